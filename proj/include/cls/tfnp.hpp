#pragma once

#include "cls/circuits.hpp"
#include "cls/core.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cls {

// Vertices are 1-based; circuits read v-1 little-endian.
struct EolInstance {
  int n = 0;
  BoolCircuit S, P;
  std::uint64_t succ(std::uint64_t v) const;
  std::uint64_t pred(std::uint64_t v) const;
  // P(1) = 1 != S(1); throws InvalidInstance
  void validate() const;
};

struct IterInstance {
  int m = 0;
  BoolCircuit C;
  std::uint64_t map(std::uint64_t u) const;
  void validate() const;  // C(1) > 1
};

EolInstance eol_from_edges(int n, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& edges);
IterInstance iter_from_map(int m, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& entries);

EolInstance preprocess_eol(const EolInstance& i);
IterInstance preprocess_iter(const IterInstance& i);
// Host-level composite evaluators for the preprocessed maps.
std::uint64_t preprocessed_succ(const EolInstance& i, std::uint64_t v);
std::uint64_t preprocessed_pred(const EolInstance& i, std::uint64_t v);
std::uint64_t preprocessed_iter(const IterInstance& i, std::uint64_t u);

bool check_eol(const EolInstance& i, std::uint64_t v);
bool check_iter(const IterInstance& i, std::uint64_t u);
std::uint64_t brute_force_eol(const EolInstance& i);
std::uint64_t brute_force_iter(const IterInstance& i);
std::vector<std::uint64_t> all_eol_solutions(const EolInstance& i);
std::vector<std::uint64_t> all_iter_solutions(const IterInstance& i);

struct Polytope {
  std::vector<Vec> A;  // rows
  Vec b;
};

struct Domain {
  Box box;                      // always set; bounding box for polytopes
  std::optional<Polytope> poly;  // general {x : Ax <= b}
  bool is_box() const { return !poly.has_value(); }
  bool contains(const Vec& x) const;
  std::size_t dim() const { return box.dim(); }
  bool operator==(const Domain& o) const;
};

// Exact shortcut used in place of circuit evaluation when a cheaper exact
// evaluator is known to agree with the circuit (e.g. the compiler's direct
// patch evaluation).
struct Oracle {
  std::function<Rational(const Vec&)> f;
  std::function<Vec(const Vec&)> grad;
};

struct KktInstance {
  Rational eps;
  Domain domain;
  ArithCircuit f;
  ArithCircuit grad_f;
  Rational L;
  std::shared_ptr<const Oracle> oracle;

  Rational eval_f(const Vec& x) const;
  Vec eval_grad(const Vec& x) const;
};

enum class GdMode { LocalSearch, Fixpoint };

struct GdInstance {
  GdMode mode = GdMode::LocalSearch;
  Rational eps;
  Rational eta;
  Domain domain;
  ArithCircuit f;
  ArithCircuit grad_f;
  Rational L;
  std::shared_ptr<const Oracle> oracle;

  Rational eval_f(const Vec& x) const;
  Vec eval_grad(const Vec& x) const;
};

struct GcloInstance {
  Rational eps;
  Domain domain;
  ArithCircuit p;  // n -> 1
  ArithCircuit g;  // n -> n
  Rational L;
  std::function<Rational(const Vec&)> p_fast;
  std::function<Vec(const Vec&)> g_fast;

  Rational eval_p(const Vec& x) const;
  Vec eval_g(const Vec& x) const;
};

enum class VerdictKind { Solution, ViolationLipschitzF, ViolationLipschitzGrad, ViolationTaylor, NotASolution };
const char* verdict_name(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::NotASolution;
  std::vector<Vec> witness;
  bool is_solution() const { return kind == VerdictKind::Solution; }
  bool is_violation() const {
    return kind == VerdictKind::ViolationLipschitzF || kind == VerdictKind::ViolationLipschitzGrad ||
           kind == VerdictKind::ViolationTaylor;
  }
};

enum class KktNorm { l2, linf };

// Box conditions given the gradient directly (no instance).
bool box_kkt(const Box& box, const Vec& x, const Vec& grad, const Rational& eps, KktNorm norm);
Verdict check_kkt(const KktInstance& inst, const Vec& x, KktNorm norm = KktNorm::linf);
Verdict check_gd(const GdInstance& inst, const Vec& x);
Verdict check_taylor(const std::function<Rational(const Vec&)>& f, const std::function<Vec(const Vec&)>& grad,
                     const Rational& L, const Vec& x, const Vec& y);
Verdict check_lipschitz(const std::function<Vec(const Vec&)>& h, const Rational& L, const Vec& x, const Vec& y,
                        KktNorm norm);
Verdict check_lipschitz(const ArithCircuit& h, const Rational& L, const Vec& x, const Vec& y, KktNorm norm);
Verdict check_gclo(const GcloInstance& inst, const Vec& x);

Vec project(const Domain& d, const Vec& x);  // boxes only

// Feasibility LP used by the polytope linf KKT check.  Exposed for tests.
bool lp_feasible(const std::vector<Vec>& A_ub, const Vec& b_ub, std::size_t nvars);

}  // namespace cls
