#pragma once

#include "cls/tfnp.hpp"

#include <optional>

namespace cls {

enum class GdStatus { Stopped, Budget };

struct GdOptions {
  std::uint64_t max_iters = 1000;
  // Round each iterate to denominator round_denom (then re-project).  Off
  // when unset.
  std::optional<Integer> round_denom;
  // Largest iterate bit size seen is tracked either way.
  std::size_t keep_tail = 0;  // last iterates kept in GdResult::tail
};

struct GdResult {
  GdStatus status = GdStatus::Budget;
  Vec x;
  Verdict verdict;
  std::uint64_t iters = 0;
  std::size_t max_bits = 0;
  std::vector<Vec> tail;
};

// The fixpoint GD instance of a KKT instance: eta = 1/L and eps * eta, so
// it stops exactly at eps-KKT candidates of the source.
GdInstance fixpoint_view(const KktInstance& k);

GdResult projected_gd(const GdInstance& inst, const Vec& start, const GdOptions& opt);

struct Solve1dResult {
  Vec point;
  Verdict verdict;  // Solution, or a Lipschitz violation with its pair
  std::uint64_t probes = 0;
  std::uint64_t grid_points = 0;  // grid spacing eps / L^2
};

Solve1dResult solve_1d_gclo(const GcloInstance& inst);

struct KktUnaryResult {
  Vec point;
  Verdict verdict;
  std::uint64_t iters = 0;
  Integer budget;
};

// ceil(16 sqrt(n) L^2 / eps^2)
Integer kkt_unary_budget(std::size_t n, const Rational& L, const Rational& eps);
KktUnaryResult solve_kkt_unary(const KktInstance& inst);

}  // namespace cls
