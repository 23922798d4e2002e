#include "cls/tfnp.hpp"

#include <algorithm>

namespace cls {

namespace {

std::uint64_t apply_map(const BoolCircuit& c, int bits, std::uint64_t v) {
  if (v < 1 || v > (std::uint64_t{1} << bits)) throw Error(Errc::OutOfRange, "vertex " + std::to_string(v));
  return from_bits(eval_bool(c, to_bits(v - 1, bits))) + 1;
}

// Small helper for composing Boolean circuits gate by gate.
struct BoolAsm {
  BoolCircuit& c;
  int push(BOp op, int a, int b = -1) {
    c.gates.push_back(BGate{op, a, b});
    return static_cast<int>(c.gates.size()) - 1;
  }
  int lnot(int a) { return push(BOp::Not, a); }
  int land(int a, int b) { return push(BOp::And, a, b); }
  int lor(int a, int b) { return push(BOp::Or, a, b); }
  int xnor(int a, int b) { return lor(land(a, b), land(lnot(a), lnot(b))); }
  int eqv(const std::vector<int>& a, const std::vector<int>& b) {
    int acc = xnor(a[0], b[0]);
    for (std::size_t i = 1; i < a.size(); ++i) acc = land(acc, xnor(a[i], b[i]));
    return acc;
  }
  // unsigned a < b, little-endian
  int ltv(const std::vector<int>& a, const std::vector<int>& b) {
    int acc = land(lnot(a[0]), b[0]);
    for (std::size_t i = 1; i < a.size(); ++i) acc = lor(land(lnot(a[i]), b[i]), land(xnor(a[i], b[i]), acc));
    return acc;
  }
  std::vector<int> muxv(int sel, const std::vector<int>& hi, const std::vector<int>& lo) {
    std::vector<int> r(hi.size());
    int ns = lnot(sel);
    for (std::size_t i = 0; i < hi.size(); ++i) r[i] = lor(land(sel, hi[i]), land(ns, lo[i]));
    return r;
  }
  std::vector<int> inline_circuit(const BoolCircuit& src, const std::vector<int>& in) {
    std::vector<int> map(src.gates.size());
    for (std::size_t i = 0; i < src.gates.size(); ++i) {
      const BGate& g = src.gates[i];
      switch (g.op) {
        case BOp::Input: map[i] = in[g.a]; break;
        case BOp::Not: map[i] = lnot(map[g.a]); break;
        case BOp::And: map[i] = land(map[g.a], map[g.b]); break;
        case BOp::Or: map[i] = lor(map[g.a], map[g.b]); break;
      }
    }
    std::vector<int> out;
    for (int o : src.outputs) out.push_back(map[o]);
    return out;
  }
};

std::vector<int> add_inputs(BoolCircuit& c, int n) {
  c.num_inputs = n;
  std::vector<int> in;
  for (int i = 0; i < n; ++i) {
    c.gates.push_back(BGate{BOp::Input, i, -1});
    in.push_back(i);
  }
  return in;
}

// out(v) = v if (F(v) != v and G(F(v)) != v) else F(v)
BoolCircuit consistent_wrap(const BoolCircuit& F, const BoolCircuit& G, int n) {
  BoolCircuit c;
  auto v = add_inputs(c, n);
  BoolAsm a{c};
  auto fv = a.inline_circuit(F, v);
  auto gfv = a.inline_circuit(G, fv);
  int bad = a.land(a.lnot(a.eqv(fv, v)), a.lnot(a.eqv(gfv, v)));
  c.outputs = a.muxv(bad, v, fv);
  return c;
}

BoolCircuit table_circuit(int bits, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& entries,
                          const char* what) {
  if (bits < 1 || bits > 20) throw Error(Errc::GuardExceeded, std::string(what) + " bit width must be in [1,20]");
  const std::uint64_t size = std::uint64_t{1} << bits;
  std::vector<std::uint64_t> table(size);
  for (std::uint64_t i = 0; i < size; ++i) table[i] = i;
  for (auto [u, w] : entries) {
    if (u < 1 || u > size || w < 1 || w > size)
      throw Error(Errc::OutOfRange, std::string(what) + " vertex out of range");
    table[u - 1] = w - 1;
  }
  return table_to_bool(table, bits, bits);
}

}  // namespace

std::uint64_t EolInstance::succ(std::uint64_t v) const { return apply_map(S, n, v); }
std::uint64_t EolInstance::pred(std::uint64_t v) const { return apply_map(P, n, v); }

void EolInstance::validate() const {
  S.validate();
  P.validate();
  if (S.num_inputs != n || P.num_inputs != n || static_cast<int>(S.outputs.size()) != n ||
      static_cast<int>(P.outputs.size()) != n)
    throw Error(Errc::InvalidInstance, "EOL circuits must map n bits to n bits");
  if (pred(1) != 1) throw Error(Errc::InvalidInstance, "P(1) must equal 1");
  if (succ(1) == 1) throw Error(Errc::InvalidInstance, "S(1) must differ from 1");
}

std::uint64_t IterInstance::map(std::uint64_t u) const { return apply_map(C, m, u); }

void IterInstance::validate() const {
  C.validate();
  if (C.num_inputs != m || static_cast<int>(C.outputs.size()) != m)
    throw Error(Errc::InvalidInstance, "Iter circuit must map m bits to m bits");
  if (map(1) <= 1) throw Error(Errc::InvalidInstance, "C(1) must exceed 1");
}

EolInstance eol_from_edges(int n, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& edges) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> back;
  for (auto [u, w] : edges) back.emplace_back(w, u);
  EolInstance i;
  i.n = n;
  i.S = table_circuit(n, edges, "EOL");
  i.P = table_circuit(n, back, "EOL");
  i.validate();
  return i;
}

IterInstance iter_from_map(int m, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& entries) {
  IterInstance i;
  i.m = m;
  i.C = table_circuit(m, entries, "Iter");
  i.validate();
  return i;
}

EolInstance preprocess_eol(const EolInstance& i) {
  EolInstance o;
  o.n = i.n;
  o.S = consistent_wrap(i.S, i.P, i.n);
  o.P = consistent_wrap(i.P, i.S, i.n);
  return o;
}

IterInstance preprocess_iter(const IterInstance& i) {
  IterInstance o;
  o.m = i.m;
  auto u = add_inputs(o.C, i.m);
  BoolAsm a{o.C};
  auto cu = a.inline_circuit(i.C, u);
  int back = a.ltv(cu, u);
  o.C.outputs = a.muxv(back, u, cu);
  return o;
}

std::uint64_t preprocessed_succ(const EolInstance& i, std::uint64_t v) {
  std::uint64_t s = i.succ(v);
  return (s != v && i.pred(s) != v) ? v : s;
}

std::uint64_t preprocessed_pred(const EolInstance& i, std::uint64_t v) {
  std::uint64_t p = i.pred(v);
  return (p != v && i.succ(p) != v) ? v : p;
}

std::uint64_t preprocessed_iter(const IterInstance& i, std::uint64_t u) {
  std::uint64_t c = i.map(u);
  return c < u ? u : c;
}

bool check_eol(const EolInstance& i, std::uint64_t v) {
  if (v < 1 || v > (std::uint64_t{1} << i.n)) throw Error(Errc::OutOfRange, "vertex");
  if (i.pred(i.succ(v)) != v) return true;
  return i.succ(i.pred(v)) != v && v != 1;
}

bool check_iter(const IterInstance& i, std::uint64_t u) {
  if (u < 1 || u > (std::uint64_t{1} << i.m)) throw Error(Errc::OutOfRange, "node");
  std::uint64_t c = i.map(u);
  if (c < u) return true;
  return c > u && i.map(c) == c;
}

std::vector<std::uint64_t> all_eol_solutions(const EolInstance& i) {
  if (i.n > 20) throw Error(Errc::GuardExceeded, "n > 20");
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = 1; v <= (std::uint64_t{1} << i.n); ++v)
    if (check_eol(i, v)) out.push_back(v);
  return out;
}

std::vector<std::uint64_t> all_iter_solutions(const IterInstance& i) {
  if (i.m > 20) throw Error(Errc::GuardExceeded, "m > 20");
  std::vector<std::uint64_t> out;
  for (std::uint64_t u = 1; u <= (std::uint64_t{1} << i.m); ++u)
    if (check_iter(i, u)) out.push_back(u);
  return out;
}

std::uint64_t brute_force_eol(const EolInstance& i) {
  auto s = all_eol_solutions(i);
  if (s.empty()) throw Error(Errc::InvalidInstance, "no solution found");
  return s.front();
}

std::uint64_t brute_force_iter(const IterInstance& i) {
  auto s = all_iter_solutions(i);
  if (s.empty()) throw Error(Errc::InvalidInstance, "no solution found");
  return s.front();
}

bool Domain::contains(const Vec& x) const {
  if (!box.contains(x)) return false;
  if (poly)
    for (std::size_t j = 0; j < poly->A.size(); ++j)
      if (dot(poly->A[j], x) > poly->b[j]) return false;
  return true;
}

bool Domain::operator==(const Domain& o) const {
  if (box.lo != o.box.lo || box.hi != o.box.hi) return false;
  if (poly.has_value() != o.poly.has_value()) return false;
  if (poly && (poly->A != o.poly->A || poly->b != o.poly->b)) return false;
  return true;
}

Rational KktInstance::eval_f(const Vec& x) const { return oracle ? oracle->f(x) : eval_arith(f, x)[0]; }
Vec KktInstance::eval_grad(const Vec& x) const { return oracle ? oracle->grad(x) : eval_arith(grad_f, x); }
Rational GdInstance::eval_f(const Vec& x) const { return oracle ? oracle->f(x) : eval_arith(f, x)[0]; }
Vec GdInstance::eval_grad(const Vec& x) const { return oracle ? oracle->grad(x) : eval_arith(grad_f, x); }
Rational GcloInstance::eval_p(const Vec& x) const { return p_fast ? p_fast(x) : eval_arith(p, x)[0]; }
Vec GcloInstance::eval_g(const Vec& x) const { return g_fast ? g_fast(x) : eval_arith(g, x); }

const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Solution: return "Solution";
    case VerdictKind::ViolationLipschitzF: return "ViolationLipschitzF";
    case VerdictKind::ViolationLipschitzGrad: return "ViolationLipschitzGrad";
    case VerdictKind::ViolationTaylor: return "ViolationTaylor";
    case VerdictKind::NotASolution: return "NotASolution";
  }
  return "?";
}

bool box_kkt(const Box& box, const Vec& x, const Vec& g, const Rational& eps, KktNorm norm) {
  if (g.size() != x.size() || x.size() != box.dim()) throw Error(Errc::DimensionMismatch, "box_kkt");
  Rational acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    bool at_lo = x[i] == box.lo[i];
    bool at_hi = x[i] == box.hi[i];
    Rational r;
    if (at_lo && at_hi) r = 0;
    else if (at_lo) r = g[i] < 0 ? Rational(-g[i]) : Rational(0);
    else if (at_hi) r = g[i] > 0 ? g[i] : Rational(0);
    else r = abs_rat(g[i]);
    if (norm == KktNorm::linf) {
      if (r > eps) return false;
    } else {
      acc += r * r;
    }
  }
  return norm == KktNorm::linf || acc <= eps * eps;
}

Verdict check_kkt(const KktInstance& inst, const Vec& x, KktNorm norm) {
  if (!inst.domain.contains(x)) throw Error(Errc::PointOutsideDomain, "check_kkt");
  Vec g = inst.eval_grad(x);
  Verdict v;
  if (inst.domain.is_box()) {
    v.kind = box_kkt(inst.domain.box, x, g, inst.eps, norm) ? VerdictKind::Solution : VerdictKind::NotASolution;
    v.witness = {x};
    return v;
  }
  if (norm != KktNorm::linf) throw Error(Errc::UnsupportedNormForPolytope, "l2 KKT on a general polytope");
  // Active constraints: the polytope rows plus the bounding box faces.
  std::vector<Vec> normals;
  const Polytope& P = *inst.domain.poly;
  for (std::size_t j = 0; j < P.A.size(); ++j)
    if (dot(P.A[j], x) == P.b[j]) normals.push_back(P.A[j]);
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n, 0);
    if (x[i] == inst.domain.box.lo[i]) { e[i] = -1; normals.push_back(e); }
    e.assign(n, 0);
    if (x[i] == inst.domain.box.hi[i]) { e[i] = 1; normals.push_back(e); }
  }
  // mu >= 0 with -eps <= g_i + sum_j mu_j a_ji <= eps
  std::vector<Vec> rows;
  Vec rhs;
  for (std::size_t i = 0; i < n; ++i) {
    Vec r(normals.size()), nr(normals.size());
    for (std::size_t j = 0; j < normals.size(); ++j) {
      r[j] = normals[j][i];
      nr[j] = -normals[j][i];
    }
    rows.push_back(r);
    rhs.push_back(inst.eps - g[i]);
    rows.push_back(nr);
    rhs.push_back(inst.eps + g[i]);
  }
  v.kind = lp_feasible(rows, rhs, normals.size()) ? VerdictKind::Solution : VerdictKind::NotASolution;
  v.witness = {x};
  return v;
}

Vec project(const Domain& d, const Vec& x) {
  if (!d.is_box()) throw Error(Errc::UnsupportedNormForPolytope, "projection onto a general polytope");
  return project_box(x, d.box);
}

Verdict check_gd(const GdInstance& inst, const Vec& x) {
  if (!inst.domain.contains(x)) throw Error(Errc::PointOutsideDomain, "check_gd");
  Vec g = inst.eval_grad(x);
  Vec y = project(inst.domain, x - inst.eta * g);
  Verdict v;
  v.witness = {x, y};
  if (inst.mode == GdMode::LocalSearch) {
    v.kind = inst.eval_f(y) >= inst.eval_f(x) - inst.eps ? VerdictKind::Solution : VerdictKind::NotASolution;
  } else {
    v.kind = norm(x - y, NormKind::l2sq) <= inst.eps * inst.eps ? VerdictKind::Solution : VerdictKind::NotASolution;
  }
  return v;
}

Verdict check_taylor(const std::function<Rational(const Vec&)>& f, const std::function<Vec(const Vec&)>& grad,
                     const Rational& L, const Vec& x, const Vec& y) {
  Rational lhs = abs_rat(f(y) - f(x) - dot(grad(x), y - x));
  Rational rhs = L / 2 * norm(y - x, NormKind::l2sq);
  Verdict v;
  v.witness = {x, y};
  v.kind = lhs <= rhs ? VerdictKind::NotASolution : VerdictKind::ViolationTaylor;
  return v;
}

Verdict check_lipschitz(const std::function<Vec(const Vec&)>& h, const Rational& L, const Vec& x, const Vec& y,
                        KktNorm nk) {
  Vec d = h(x) - h(y);
  bool ok;
  if (nk == KktNorm::l2) ok = norm(d, NormKind::l2sq) <= L * L * norm(x - y, NormKind::l2sq);
  else ok = norm(d, NormKind::linf) <= L * norm(x - y, NormKind::linf);
  Verdict v;
  v.witness = {x, y};
  v.kind = ok ? VerdictKind::NotASolution : VerdictKind::ViolationLipschitzF;
  return v;
}

Verdict check_lipschitz(const ArithCircuit& h, const Rational& L, const Vec& x, const Vec& y, KktNorm nk) {
  return check_lipschitz([&](const Vec& p) { return eval_arith(h, p); }, L, x, y, nk);
}

Verdict check_gclo(const GcloInstance& inst, const Vec& x) {
  if (!inst.domain.contains(x)) throw Error(Errc::PointOutsideDomain, "check_gclo");
  Vec y = project(inst.domain, inst.eval_g(x));
  Verdict v;
  v.witness = {x, y};
  v.kind = inst.eval_p(y) >= inst.eval_p(x) - inst.eps ? VerdictKind::Solution : VerdictKind::NotASolution;
  return v;
}

// Phase-one simplex with Bland's rule on  A mu + s = b, mu, s >= 0.
bool lp_feasible(const std::vector<Vec>& A, const Vec& b, std::size_t nv) {
  const std::size_t m = A.size();
  if (m == 0) return true;
  // columns: nv structural, m slack, m artificial, then rhs
  const std::size_t cols = nv + 2 * m;
  std::vector<Vec> T(m, Vec(cols + 1, 0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rational sign = b[i] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < nv; ++j) T[i][j] = sign * A[i][j];
    T[i][nv + i] = sign;
    T[i][nv + m + i] = 1;
    T[i][cols] = sign * b[i];
    basis[i] = nv + m + i;
  }
  // objective: minimize sum of artificials; reduced costs row
  Vec obj(cols + 1, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= cols; ++j)
      if (j < nv + m || j == cols) obj[j] -= T[i][j];
  for (int iter = 0; iter < 100000; ++iter) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (obj[j] < 0) { enter = j; break; }
    if (enter == cols) break;
    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][enter] <= 0) continue;
      Rational ratio = T[i][cols] / T[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // cannot happen in phase one (bounded below by 0)
    Rational piv = T[leave][enter];
    for (auto& v : T[leave]) v /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || T[i][enter] == 0) continue;
      Rational f = T[i][enter];
      for (std::size_t j = 0; j <= cols; ++j) T[i][j] -= f * T[leave][j];
    }
    if (obj[enter] != 0) {
      Rational f = obj[enter];
      for (std::size_t j = 0; j <= cols; ++j) obj[j] -= f * T[leave][j];
    }
    basis[leave] = enter;
  }
  return obj[cols] == 0;
}

}  // namespace cls
