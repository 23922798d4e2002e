#pragma once

#include "cls/kkt_compiler.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cls {

// Bicubic patch of one small square in integer form: a2 = 2 * a.
// Evaluation is on the quarter lattice u = p/4, w = q/4 (p, q in 0..4)
// and returns f * 8192, f_x * 2048 and f_y * 2048 exactly.
struct IntPatch {
  __int128 a2[4][4];
  static IntPatch make(const Grid& g, std::int64_t x, std::int64_t y);
  void eval_quarter(int p, int q, __int128& f, __int128& fx, __int128& fy) const;
};

struct RegimeScanResult {
  std::uint64_t points = 0;
  std::uint64_t value_mismatches = 0;  // patch value differs from the regime formula of the point's colour
  std::uint64_t arrow_mismatches = 0;  // patch gradient differs from the arrow
  std::uint64_t gap_violations = 0;    // consecutive regimes closer than min_required
  std::int64_t min_gap = 0;            // smallest consecutive regime difference seen
  bool operator==(const RegimeScanResult&) const = default;
};

RegimeScanResult regime_scan_serial(const Grid& g, std::int64_t min_required = 10);
RegimeScanResult regime_scan_parallel(const Grid& g, std::int64_t min_required = 10);

struct ScanHit {
  std::string x, y;
  std::string decode;
  bool operator==(const ScanHit&) const = default;
};

struct DecoderScanResult {
  std::uint64_t squares = 0;
  std::uint64_t points = 0;
  std::uint64_t hits = 0;                         // eps-KKT points found
  std::uint64_t refined = 0;                      // squares given a Newton refinement
  std::uint64_t refined_hits = 0;                 // hits found by refinement
  std::map<std::string, std::uint64_t> by_decode; // hits grouped by decode outcome
  std::uint64_t unsound = 0;                      // hits decoding to NotInSolutionRegion
  std::vector<ScanHit> first_unsound;             // up to 16, in scan order
  bool operator==(const DecoderScanResult&) const = default;
};

// Checks the box eps-KKT conditions (linf form) on the quarter lattice of
// every small square, 16 points per square plus the far edges.  A square
// without a lattice hit gets one Newton refinement of its gradient from the
// best lattice point, confirmed exactly.  Every hit is decoded.  eps must be
// positive.
DecoderScanResult decoder_scan_serial(const Grid& g, const Rational& eps);
DecoderScanResult decoder_scan_parallel(const Grid& g, const Rational& eps);

// A point of small square (x, y) whose gradient linf norm is at most tol,
// found by double Newton from a 5x5 seed grid followed by exact Newton steps
// on the rational patch (iterates rounded to denominator 2^128).  Points are
// in grid coordinates; empty when no seed converges inside the square.
std::optional<Vec> locate_stationary(const Grid& g, std::int64_t x, std::int64_t y, const Rational& tol);

}  // namespace cls
