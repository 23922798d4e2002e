#pragma once

#include "cls/tfnp.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cls {

// What the source-side checker made of a back-mapped point.  `point` is the
// candidate solution of the source instance; when the proof's witness pair
// exhibits a violation instead, `verdict` carries it with the pair.
struct BackMapResult {
  Vec point;
  Verdict verdict;
};

// Back-mapping of one reduction.  `rule` names the map applied to a target
// solution and `witness_pairs` the pairs inspected for violations.
struct BackMap {
  std::string rule;
  std::string witness_pairs;
  std::function<BackMapResult(const Vec&)> apply;
};

template <class T>
struct Reduced {
  T instance;
  BackMap back;
};

Reduced<GdInstance> gdls_to_gdfp(const GdInstance& src);
Reduced<KktInstance> gdfp_to_kkt(const GdInstance& src);
Reduced<GdInstance> kkt_to_gdls(const KktInstance& src);
Reduced<GcloInstance> gdls_to_gclo(const GdInstance& src);

// g' = clamp(g) onto [0,1]^2.  Solutions and violations map back verbatim.
Reduced<GcloInstance> gclo_clamp_2d(const GcloInstance& src);
// p' = min{1, max{0, 1/2 + (p(x) - p(z_c)) / (2nL)}} on [0,1]^n.
Reduced<GcloInstance> clo_normalize_codomain(const GcloInstance& src);
// k1-dimensional instance on [0,1]^k1 to [0,1]^k2 by ignoring extra inputs.
Reduced<GcloInstance> clo_pad_dimension(const GcloInstance& src, std::size_t k2);

struct BrouwerInstance {
  Rational eps;  // approximation of the fixed point of Pi_D o g
  Domain domain;
  ArithCircuit g;
  Rational L;
  std::function<Vec(const Vec&)> g_fast;
  Vec eval_g(const Vec& x) const;
};

// ||Pi_D(g(x)) - x|| <= eps, l2 with exact squared comparison.
bool is_brouwer_solution(const BrouwerInstance& b, const Vec& x);

Reduced<BrouwerInstance> gclo_to_brouwer(const GcloInstance& src);

struct EitherInstance {
  EolInstance eol;
  IterInstance iter;
};

enum class EitherSide { Eol, Iter };

EitherInstance either_combine(const EolInstance& a, const IterInstance& b);
bool check_either(const EitherInstance& e, EitherSide side, std::uint64_t v);

}  // namespace cls
