#pragma once

#include "cls/circuits.hpp"
#include "cls/layout.hpp"
#include "cls/tfnp.hpp"

#include <array>
#include <string>

namespace cls {

// Prescribed data at the four corners of a small square, indexed [i][j]
// with i the x offset and j the y offset.
struct CornerData {
  Rational f[2][2];
  Rational fx[2][2];
  Rational fy[2][2];
};

struct PatchCoeffs {
  std::array<std::array<Rational, 4>, 4> a;  // a[i][j] multiplies x^i y^j
};

PatchCoeffs patch_coeffs(const CornerData& d);

struct ValueGrad {
  Rational f;
  Vec grad;
};

ValueGrad eval_patch(const PatchCoeffs& p, const Rational& u, const Rational& w);

CornerData square_corner_data(const Grid& g, std::int64_t x, std::int64_t y);
PatchCoeffs square_patch(const Grid& g, std::int64_t x, std::int64_t y);
// lower-left corner of the small square used for p (nearest square outside)
std::pair<std::int64_t, std::int64_t> square_of(const GridSpec& g, const Vec& p);

ValueGrad eval_direct(const Grid& g, const Vec& p);

struct EmittedCircuits {
  ArithCircuit f;
  ArithCircuit grad;
};

EmittedCircuits emit_circuits(const Grid& g);

// Domain [0,N]^2, eps = 1/100, L = 2^18 N.  The oracle evaluates the same
// function through eval_direct.
KktInstance emit_instance(const Grid& g);

// f^(x) = f(N x)/N on [0,1]^2 with L^ = N L.
KktInstance rescale(const KktInstance& inst, const Rational& N);
// (eps, f, L) -> (alpha eps, alpha f, alpha L)
KktInstance alpha_scale(const KktInstance& inst, const Rational& alpha);

enum class DecodeKind { EolSolution, IterSolution, NotInSolutionRegion };

struct DecodeResult {
  DecodeKind kind = DecodeKind::NotInSolutionRegion;
  std::uint64_t value = 0;
  std::string describe() const;
};

// unit = true when p is in [0,1]^2 coordinates.
DecodeResult decode_solution(const Grid& g, const Vec& p, bool unit);

void render_svg(const Grid& g, const Box& window, const std::string& path);

}  // namespace cls
