#include "cls/solvers.hpp"

#include "cls/reductions.hpp"

namespace cls {

GdInstance fixpoint_view(const KktInstance& k) {
  GdInstance g;
  g.mode = GdMode::Fixpoint;
  g.eta = 1 / k.L;
  g.eps = k.eps * g.eta;
  g.domain = k.domain;
  g.f = k.f;
  g.grad_f = k.grad_f;
  g.L = k.L;
  g.oracle = k.oracle;
  return g;
}

GdResult projected_gd(const GdInstance& inst, const Vec& start, const GdOptions& opt) {
  if (!inst.domain.contains(start)) throw Error(Errc::StartOutsideDomain, "projected_gd start");
  GdResult r;
  Vec x = start;
  for (r.iters = 0;; ++r.iters) {
    r.max_bits = std::max(r.max_bits, bit_size(x));
    if (opt.keep_tail) {
      r.tail.push_back(x);
      if (r.tail.size() > opt.keep_tail) r.tail.erase(r.tail.begin());
    }
    Vec y = project(inst.domain, x - inst.eta * inst.eval_grad(x));
    bool stop;
    if (inst.mode == GdMode::LocalSearch) stop = inst.eval_f(y) >= inst.eval_f(x) - inst.eps;
    else stop = norm(x - y, NormKind::l2sq) <= inst.eps * inst.eps;
    if (stop) {
      r.status = GdStatus::Stopped;
      r.x = x;
      r.verdict = check_gd(inst, x);
      return r;
    }
    if (r.iters >= opt.max_iters) break;
    if (opt.round_denom) {
      for (auto& v : y) v = round_to_denominator(v, *opt.round_denom);
      y = project(inst.domain, y);
    }
    x = std::move(y);
  }
  r.status = GdStatus::Budget;
  r.x = x;
  r.verdict.witness = {x};
  return r;
}

Solve1dResult solve_1d_gclo(const GcloInstance& inst) {
  if (inst.domain.dim() != 1) throw Error(Errc::DimensionNotOne, "solve_1d_gclo");
  const Rational t1 = inst.domain.box.lo[0], t2 = inst.domain.box.hi[0];
  const Rational step = inst.eps / (inst.L * inst.L);
  const Integer K = ceil_rat((t2 - t1) / step);
  Solve1dResult r;
  r.grid_points = K.get_ui() + 1;
  auto point = [&](const Integer& k) { return Vec{k >= K ? t2 : Rational(t1 + step * k)}; };
  auto gap = [&](const Vec& x) -> Rational {  // Pi_D(g(x)) - x
    ++r.probes;
    return project(inst.domain, inst.eval_g(x))[0] - x[0];
  };
  // invariant: gap(lo) >= 0 >= gap(hi); holds at the ends by projection
  Integer lo = 0, hi = K;
  Rational glo = gap(point(lo)), ghi = gap(point(hi));
  if (glo <= 0) hi = lo;
  else if (ghi >= 0) lo = hi;
  while (hi - lo > 1) {
    Integer mid = (lo + hi) / 2;
    Rational gm = gap(point(mid));
    if (gm >= 0) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
      ghi = gm;
    }
  }
  const Rational tol = inst.eps / inst.L;
  std::optional<Vec> fixed;
  if (abs_rat(glo) <= tol) fixed = point(lo);
  else if (abs_rat(ghi) <= tol) fixed = point(hi);
  if (!fixed) {
    // both ends move more than eps/L in opposite directions over a step of
    // eps/L^2: Pi_D o g (hence g) is not L-Lipschitz on this pair
    Vec a = point(lo), b = point(hi);
    Verdict v = check_lipschitz([&](const Vec& x) { return inst.eval_g(x); }, inst.L, a, b, KktNorm::l2);
    if (!v.is_violation()) throw Error(Errc::NoWitness, "1D search ended without a fixed point or violation");
    r.point = a;
    r.verdict = v;
    return r;
  }
  r.point = *fixed;
  r.verdict = check_gclo(inst, r.point);
  if (!r.verdict.is_solution()) {
    Vec y = project(inst.domain, inst.eval_g(r.point));
    Verdict v = check_lipschitz([&](const Vec& x) { return Vec{inst.eval_p(x)}; }, inst.L, r.point, y, KktNorm::l2);
    if (v.is_violation()) r.verdict = v;
  }
  return r;
}

Integer kkt_unary_budget(std::size_t n, const Rational& L, const Rational& eps) {
  // smallest k with k^2 >= n (16 L^2 / eps^2)^2
  const Rational c = 16 * L * L / (eps * eps);
  const Rational target = Rational(static_cast<long>(n)) * c * c;
  Integer t = ceil_rat(target), k;
  mpz_sqrt(k.get_mpz_t(), t.get_mpz_t());
  while (Rational(k * k) < target) ++k;
  return k;
}

KktUnaryResult solve_kkt_unary(const KktInstance& inst) {
  const std::size_t n = inst.domain.dim();
  if (!inst.domain.is_box() || !(inst.domain.box == Box::unit(n)))
    throw Error(Errc::InvalidInstance, "solve_kkt_unary needs domain [0,1]^n");
  KktUnaryResult r;
  r.budget = kkt_unary_budget(n, inst.L, inst.eps);
  if (!r.budget.fits_ulong_p() || r.budget > 100000000)
    throw Error(Errc::BudgetExceeded, "parameters are not unary-scale: budget " + r.budget.get_str());
  auto red = kkt_to_gdls(inst);
  GdOptions opt;
  opt.max_iters = r.budget.get_ui();
  GdResult gd = projected_gd(red.instance, Vec(n, 0), opt);
  r.iters = gd.iters;
  if (gd.status != GdStatus::Stopped) {
    // every non-final step drops f by more than eps'; running out means f
    // left the interval f(0) +- sqrt(n) L, i.e. f is not L-Lipschitz
    Verdict v = check_lipschitz([&](const Vec& x) { return Vec{inst.eval_f(x)}; }, inst.L, Vec(n, 0), gd.x,
                                KktNorm::l2);
    if (!v.is_violation()) throw Error(Errc::BudgetExceeded, "gradient descent exceeded the step bound");
    r.point = gd.x;
    r.verdict = v;
    return r;
  }
  BackMapResult b = red.back.apply(gd.x);
  r.point = b.point;
  r.verdict = b.verdict;
  return r;
}

}  // namespace cls
