#include "cls/reductions.hpp"

#include "cls/builder.hpp"

namespace cls {

namespace {

Verdict lipschitz_as(VerdictKind kind, const std::function<Vec(const Vec&)>& h, const Rational& L, const Vec& x,
                     const Vec& y) {
  Verdict v = check_lipschitz(h, L, x, y, KktNorm::l2);
  if (v.kind != VerdictKind::NotASolution) v.kind = kind;
  return v;
}

std::function<Vec(const Vec&)> scalar_fn(std::function<Rational(const Vec&)> f) {
  return [f](const Vec& x) { return Vec{f(x)}; };
}

}  // namespace

Reduced<GdInstance> gdls_to_gdfp(const GdInstance& src) {
  if (src.mode != GdMode::LocalSearch) throw Error(Errc::InvalidInstance, "gdls_to_gdfp expects a LocalSearch instance");
  Reduced<GdInstance> r;
  r.instance = src;
  r.instance.mode = GdMode::Fixpoint;
  r.instance.eps = src.eps / src.L;
  r.back.rule = "x -> x";
  r.back.witness_pairs = "(x, Pi_D(x - eta grad f(x))) for L-Lipschitz f";
  r.back.apply = [src](const Vec& x) {
    BackMapResult out{x, check_gd(src, x)};
    if (out.verdict.is_solution()) return out;
    Vec y = project(src.domain, x - src.eta * src.eval_grad(x));
    Verdict v = lipschitz_as(VerdictKind::ViolationLipschitzF, scalar_fn([src](const Vec& p) { return src.eval_f(p); }),
                             src.L, x, y);
    if (v.is_violation()) out.verdict = v;
    return out;
  };
  return r;
}

Reduced<KktInstance> gdfp_to_kkt(const GdInstance& src) {
  if (src.mode != GdMode::Fixpoint) throw Error(Errc::InvalidInstance, "gdfp_to_kkt expects a Fixpoint instance");
  Reduced<KktInstance> r;
  r.instance.eps = src.eps / src.eta;
  r.instance.domain = src.domain;
  r.instance.f = src.f;
  r.instance.grad_f = src.grad_f;
  r.instance.L = src.L;
  r.instance.oracle = src.oracle;
  r.back.rule = "x -> x";
  r.back.witness_pairs = "none";
  r.back.apply = [src](const Vec& x) { return BackMapResult{x, check_gd(src, x)}; };
  return r;
}

Reduced<GdInstance> kkt_to_gdls(const KktInstance& src) {
  Reduced<GdInstance> r;
  GdInstance& g = r.instance;
  g.mode = GdMode::LocalSearch;
  g.eps = src.eps * src.eps / (8 * src.L);
  g.eta = 1 / src.L;
  g.domain = src.domain;
  g.f = src.f;
  g.grad_f = src.grad_f;
  g.L = src.L;
  g.oracle = src.oracle;
  r.back.rule = "x -> y = Pi_D(x - grad f(x) / L)";
  r.back.witness_pairs = "(x, y) for Taylor's bound and for L-Lipschitz grad f";
  r.back.apply = [src](const Vec& x) {
    const Rational eta = 1 / src.L;
    Vec y = project(src.domain, x - eta * src.eval_grad(x));
    BackMapResult out{y, check_kkt(src, y)};
    if (out.verdict.is_solution()) return out;
    auto f = [&](const Vec& p) { return src.eval_f(p); };
    auto gr = [&](const Vec& p) { return src.eval_grad(p); };
    Verdict t = check_taylor(f, gr, src.L, x, y);
    if (t.is_violation()) {
      out.verdict = t;
      return out;
    }
    Verdict l = lipschitz_as(VerdictKind::ViolationLipschitzGrad, gr, src.L, x, y);
    if (l.is_violation()) out.verdict = l;
    return out;
  };
  return r;
}

Reduced<GcloInstance> gdls_to_gclo(const GdInstance& src) {
  if (src.mode != GdMode::LocalSearch) throw Error(Errc::InvalidInstance, "gdls_to_gclo expects a LocalSearch instance");
  const int n = static_cast<int>(src.domain.dim());
  Builder b(n);
  std::vector<int> in;
  for (int i = 0; i < n; ++i) in.push_back(b.input(i));
  auto grad = b.inline_circuit(src.grad_f, in);
  std::vector<int> out;
  for (int i = 0; i < n; ++i) out.push_back(b.sub(in[i], b.mulc(src.eta, grad[i])));
  Reduced<GcloInstance> r;
  GcloInstance& c = r.instance;
  c.eps = src.eps;
  c.domain = src.domain;
  c.p = src.f;
  c.g = b.finish(out);
  c.L = std::max<Rational>(src.eta * src.L + 1, src.L);
  if (src.oracle) {
    auto o = src.oracle;
    const Rational eta = src.eta;
    c.p_fast = [o](const Vec& x) { return o->f(x); };
    c.g_fast = [o, eta](const Vec& x) { return x - eta * o->grad(x); };
  }
  r.back.rule = "x -> x";
  r.back.witness_pairs = "violations of p or g map to violations of f or grad f on the same pair";
  r.back.apply = [src](const Vec& x) { return BackMapResult{x, check_gd(src, x)}; };
  return r;
}

Reduced<GcloInstance> gclo_clamp_2d(const GcloInstance& src) {
  if (src.domain.dim() != 2 || !src.domain.is_box() || !(src.domain.box == Box::unit(2)))
    throw Error(Errc::DomainNotUnitSquare, "gclo_clamp_2d needs domain [0,1]^2");
  Builder b(2);
  std::vector<int> in{b.input(0), b.input(1)};
  auto g = b.inline_circuit(src.g, in);
  Reduced<GcloInstance> r;
  r.instance = src;
  r.instance.g = b.finish({b.clamp(g[0], 0, 1), b.clamp(g[1], 0, 1)});
  if (src.g_fast) {
    auto gf = src.g_fast;
    const Box box = src.domain.box;
    r.instance.g_fast = [gf, box](const Vec& x) { return project_box(gf(x), box); };
  }
  r.back.rule = "x -> x";
  r.back.witness_pairs = "same pair; clamping never increases distances";
  r.back.apply = [src](const Vec& x) { return BackMapResult{x, check_gclo(src, x)}; };
  return r;
}

Reduced<GcloInstance> clo_normalize_codomain(const GcloInstance& src) {
  const std::size_t n = src.domain.dim();
  if (!src.domain.is_box() || !(src.domain.box == Box::unit(n)))
    throw Error(Errc::InvalidInstance, "codomain normalization needs domain [0,1]^n");
  const Vec zc(n, Rational(1, 2));
  const Rational pz = src.eval_p(zc);
  const Rational scale = 1 / (2 * Rational(static_cast<long>(n)) * src.L);
  Builder b(static_cast<int>(n));
  std::vector<int> in;
  for (std::size_t i = 0; i < n; ++i) in.push_back(b.input(static_cast<int>(i)));
  const int p = b.inline_circuit(src.p, in)[0];
  const int lin = b.lincomb({{scale, p}}, Rational(1, 2) - scale * pz);
  Reduced<GcloInstance> r;
  r.instance = src;
  r.instance.eps = src.eps * scale;
  r.instance.L = std::max<Rational>(src.L, 1 / (2 * Rational(static_cast<long>(n))));
  r.instance.p = b.finish({b.clamp(lin, 0, 1)});
  if (src.p_fast) {
    auto pf = src.p_fast;
    r.instance.p_fast = [pf, scale, pz](const Vec& x) {
      Rational v = Rational(1, 2) + scale * (pf(x) - pz);
      if (v < 0) return Rational(0);
      if (v > 1) return Rational(1);
      return v;
    };
  }
  r.back.rule = "x -> x";
  r.back.witness_pairs = "(x, z_c) for L-Lipschitz p when the clamp engages at x or at Pi_D(g(x))";
  r.back.apply = [src, scale, pz, zc](const Vec& x) {
    auto engaged = [&](const Rational& p) {
      Rational v = Rational(1, 2) + scale * (p - pz);
      return v < 0 || v > 1;
    };
    auto pv = scalar_fn([&](const Vec& q) { return src.eval_p(q); });
    BackMapResult out{x, check_gclo(src, x)};
    if (out.verdict.is_solution()) return out;
    const Vec y = out.verdict.witness.size() > 1 ? out.verdict.witness[1] : x;
    for (const Vec* q : {&x, &y}) {
      if (engaged(src.eval_p(*q))) {
        Verdict v = lipschitz_as(VerdictKind::ViolationLipschitzF, pv, src.L, *q, zc);
        if (v.is_violation()) {
          out.verdict = v;
          return out;
        }
      }
    }
    return out;
  };
  return r;
}

Reduced<GcloInstance> clo_pad_dimension(const GcloInstance& src, std::size_t k2) {
  const std::size_t k1 = src.domain.dim();
  if (k2 <= k1) throw Error(Errc::DimensionMismatch, "padding must increase the dimension");
  if (!src.domain.is_box() || !(src.domain.box == Box::unit(k1)))
    throw Error(Errc::InvalidInstance, "padding needs domain [0,1]^k1");
  Builder bp(static_cast<int>(k2)), bg(static_cast<int>(k2));
  std::vector<int> inp, ing;
  for (std::size_t i = 0; i < k1; ++i) {
    inp.push_back(bp.input(static_cast<int>(i)));
    ing.push_back(bg.input(static_cast<int>(i)));
  }
  // extra inputs must still exist as gates so the circuit has k2 inputs
  auto p = bp.inline_circuit(src.p, inp);
  auto g = bg.inline_circuit(src.g, ing);
  for (std::size_t i = k1; i < k2; ++i) g.push_back(bg.constant(0));
  Reduced<GcloInstance> r;
  r.instance = src;
  r.instance.domain.box = Box::unit(k2);
  r.instance.p = bp.finish(p);
  r.instance.g = bg.finish(g);
  auto trunc = [k1](const Vec& x) { return Vec(x.begin(), x.begin() + static_cast<long>(k1)); };
  if (src.p_fast) {
    auto pf = src.p_fast;
    r.instance.p_fast = [pf, trunc](const Vec& x) { return pf(trunc(x)); };
  }
  if (src.g_fast) {
    auto gf = src.g_fast;
    r.instance.g_fast = [gf, trunc, k2](const Vec& x) {
      Vec v = gf(trunc(x));
      v.resize(k2, 0);
      return v;
    };
  }
  r.back.rule = "x -> (x_1..x_k1)";
  r.back.witness_pairs = "truncated pair";
  r.back.apply = [src, trunc](const Vec& x) {
    Vec t = trunc(x);
    return BackMapResult{t, check_gclo(src, t)};
  };
  return r;
}

Vec BrouwerInstance::eval_g(const Vec& x) const { return g_fast ? g_fast(x) : eval_arith(g, x); }

bool is_brouwer_solution(const BrouwerInstance& b, const Vec& x) {
  Vec y = project(b.domain, b.eval_g(x));
  return norm(y - x, NormKind::l2sq) <= b.eps * b.eps;
}

Reduced<BrouwerInstance> gclo_to_brouwer(const GcloInstance& src) {
  Reduced<BrouwerInstance> r;
  r.instance.eps = src.eps / src.L;
  r.instance.domain = src.domain;
  r.instance.g = src.g;
  r.instance.L = src.L;
  r.instance.g_fast = src.g_fast;
  r.back.rule = "x* -> x*";
  r.back.witness_pairs = "(x*, Pi_D(g(x*))) for L-Lipschitz p";
  r.back.apply = [src](const Vec& x) {
    BackMapResult out{x, check_gclo(src, x)};
    if (out.verdict.is_solution()) return out;
    Vec y = project(src.domain, src.eval_g(x));
    Verdict v = lipschitz_as(VerdictKind::ViolationLipschitzF, scalar_fn([src](const Vec& q) { return src.eval_p(q); }),
                             src.L, x, y);
    if (v.is_violation()) out.verdict = v;
    return out;
  };
  return r;
}

EitherInstance either_combine(const EolInstance& a, const IterInstance& b) { return EitherInstance{a, b}; }

bool check_either(const EitherInstance& e, EitherSide side, std::uint64_t v) {
  return side == EitherSide::Eol ? check_eol(e.eol, v) : check_iter(e.iter, v);
}

}  // namespace cls
