#include "cls/kkt_compiler.hpp"

#include <fstream>
#include <sstream>

namespace cls {

namespace {
constexpr int kA[4][4] = {{1, 0, 0, 0}, {0, 0, 1, 0}, {-3, 3, -2, -1}, {2, -2, 1, 1}};
}

PatchCoeffs patch_coeffs(const CornerData& d) {
  Rational F[4][4];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      F[i][j] = d.f[i][j];
      F[i][2 + j] = d.fy[i][j];
      F[2 + i][j] = d.fx[i][j];
      F[2 + i][2 + j] = 0;  // cross derivatives are prescribed as zero
    }
  Rational AF[4][4];
  for (int r = 0; r < 4; ++r)
    for (int q = 0; q < 4; ++q) {
      Rational s = 0;
      for (int k = 0; k < 4; ++k)
        if (kA[r][k]) s += kA[r][k] * F[k][q];
      AF[r][q] = s;
    }
  PatchCoeffs p;
  for (int r = 0; r < 4; ++r)
    for (int q = 0; q < 4; ++q) {
      Rational s = 0;
      for (int k = 0; k < 4; ++k)
        if (kA[q][k]) s += AF[r][k] * kA[q][k];
      p.a[r][q] = s;
    }
  return p;
}

ValueGrad eval_patch(const PatchCoeffs& p, const Rational& u, const Rational& w) {
  Rational up[4] = {1, u, u * u, 0}, wp[4] = {1, w, w * w, 0};
  up[3] = up[2] * u;
  wp[3] = wp[2] * w;
  ValueGrad r{0, Vec(2, 0)};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Rational& a = p.a[i][j];
      if (a == 0) continue;
      r.f += a * up[i] * wp[j];
      if (i) r.grad[0] += i * a * up[i - 1] * wp[j];
      if (j) r.grad[1] += j * a * up[i] * wp[j - 1];
    }
  return r;
}

CornerData square_corner_data(const Grid& g, std::int64_t x, std::int64_t y) {
  CornerData d;
  const Integer N(static_cast<long>(g.spec().N));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      PointData pd = g.point_data(x + i, y + j);
      d.f[i][j] = regime_value(pd.color, Integer(static_cast<long>(x + i)), Integer(static_cast<long>(y + j)), N);
      auto [gx, gy] = arrow_gradient(pd.arrow);
      d.fx[i][j] = gx;
      d.fy[i][j] = gy;
    }
  return d;
}

PatchCoeffs square_patch(const Grid& g, std::int64_t x, std::int64_t y) {
  return patch_coeffs(square_corner_data(g, x, y));
}

std::pair<std::int64_t, std::int64_t> square_of(const GridSpec& g, const Vec& p) {
  auto idx = [&](const Rational& v) -> std::int64_t {
    if (v <= 0) return 0;
    if (v >= g.N - 1) return g.N - 1;
    return floor_rat(v).get_si();
  };
  return {idx(p[0]), idx(p[1])};
}

ValueGrad eval_direct(const Grid& g, const Vec& p) {
  if (p.size() != 2) throw Error(Errc::DimensionMismatch, "eval_direct expects a 2-vector");
  auto [sx, sy] = square_of(g.spec(), p);
  PatchCoeffs pc = square_patch(g, sx, sy);
  return eval_patch(pc, p[0] - sx, p[1] - sy);
}

KktInstance emit_instance(const Grid& g) {
  EmittedCircuits ec = emit_circuits(g);
  KktInstance k;
  k.eps = Rational(1, 100);
  const Rational N(static_cast<long>(g.spec().N));
  k.domain.box = Box::cube(2, 0, N);
  k.f = std::move(ec.f);
  k.grad_f = std::move(ec.grad);
  k.L = pow2(18) * N;
  auto grid = std::make_shared<Grid>(g);
  auto o = std::make_shared<Oracle>();
  o->f = [grid](const Vec& x) { return eval_direct(*grid, x).f; };
  o->grad = [grid](const Vec& x) { return eval_direct(*grid, x).grad; };
  k.oracle = o;
  return k;
}

namespace {

ArithCircuit wrap_scaled(const ArithCircuit& inner, const Rational& in_scale, const Rational& out_scale) {
  ArithCircuit c;
  c.num_inputs = inner.num_inputs;
  std::vector<int> in;
  for (int i = 0; i < inner.num_inputs; ++i) {
    c.gates.push_back(Gate{Op::Input, i, -1, 0});
    c.gates.push_back(Gate{Op::MulC, static_cast<int>(c.gates.size()) - 1, -1, in_scale});
    in.push_back(static_cast<int>(c.gates.size()) - 1);
  }
  const int base = static_cast<int>(c.gates.size());
  for (const Gate& g0 : inner.gates) {
    Gate g = g0;
    if (g.op == Op::Input) {
      g = Gate{Op::MulC, in[g0.a], -1, 1};  // identity on the scaled input
    } else if (g.op != Op::Const) {
      g.a += base;
      if (g.op != Op::MulC) g.b += base;
    }
    c.gates.push_back(std::move(g));
  }
  for (int o : inner.outputs) {
    if (out_scale == 1) {
      c.outputs.push_back(o + base);
    } else {
      c.gates.push_back(Gate{Op::MulC, o + base, -1, out_scale});
      c.outputs.push_back(static_cast<int>(c.gates.size()) - 1);
    }
  }
  return c;
}

}  // namespace

KktInstance rescale(const KktInstance& inst, const Rational& N) {
  KktInstance r;
  r.eps = inst.eps;
  r.domain.box = Box::cube(inst.domain.dim(), 0, 1);
  r.f = wrap_scaled(inst.f, N, 1 / N);
  r.grad_f = wrap_scaled(inst.grad_f, N, 1);
  r.L = N * inst.L;
  if (inst.oracle) {
    auto base = inst.oracle;
    auto o = std::make_shared<Oracle>();
    o->f = [base, N](const Vec& x) -> Rational { return base->f(N * x) / N; };
    o->grad = [base, N](const Vec& x) { return base->grad(N * x); };
    r.oracle = o;
  }
  return r;
}

KktInstance alpha_scale(const KktInstance& inst, const Rational& alpha) {
  KktInstance r = inst;
  r.eps = alpha * inst.eps;
  r.L = alpha * inst.L;
  r.f = wrap_scaled(inst.f, 1, alpha);
  r.grad_f = wrap_scaled(inst.grad_f, 1, alpha);
  if (inst.oracle) {
    auto base = inst.oracle;
    auto o = std::make_shared<Oracle>();
    o->f = [base, alpha](const Vec& x) -> Rational { return alpha * base->f(x); };
    o->grad = [base, alpha](const Vec& x) { return alpha * base->grad(x); };
    r.oracle = o;
  }
  return r;
}

std::string DecodeResult::describe() const {
  switch (kind) {
    case DecodeKind::EolSolution: return "EolSolution(" + std::to_string(value) + ")";
    case DecodeKind::IterSolution: return "IterSolution(" + std::to_string(value) + ")";
    case DecodeKind::NotInSolutionRegion: return "NotInSolutionRegion";
  }
  return "?";
}

DecodeResult decode_solution(const Grid& g, const Vec& p0, bool unit) {
  if (p0.size() != 2) throw Error(Errc::DimensionMismatch, "decode expects a 2-vector");
  const GridSpec& gs = g.spec();
  Vec p = unit ? Rational(static_cast<long>(gs.N)) * p0 : p0;
  auto [sx, sy] = square_of(gs, p);
  const std::int64_t v1 = g.big_index(sx), v2 = g.big_index(sy);
  DecodeResult r;
  if (v1 == v2 && check_eol(g.eol(), static_cast<std::uint64_t>(v1))) {
    r.kind = DecodeKind::EolSolution;
    r.value = static_cast<std::uint64_t>(v1);
    return r;
  }
  const BigType t = g.big_square_type(v1, v2);
  if (t != BigType::LA && t != BigType::LB) return r;
  const Rational s(static_cast<long>(gs.big_side));
  Rational li = p[0] - (v1 - 1) * s, lj = p[1] - (v2 - 1) * s;
  if (t == BigType::LB) {
    li = s - li;
    lj = s - lj;
  }
  const Rational dx = gs.lab_x0() - li, dy = lj - gs.lab_y0();
  const std::int64_t M = std::int64_t{1} << gs.m;
  const Integer u1 = ceil_rat(dx / 4), u2 = floor_rat(dy / 4) + 1;
  if (u1 < 1 || u1 > M || u2 < 1 || u2 > M || u1 != u2) return r;
  const std::uint64_t u = u1.get_ui();
  if (check_iter(g.iter(), u)) {
    r.kind = DecodeKind::IterSolution;
    r.value = u;
  }
  return r;
}

void render_svg(const Grid& g, const Box& window, const std::string& path) {
  const Integer x0 = ceil_rat(window.lo[0]), x1 = floor_rat(window.hi[0]);
  const Integer y0 = ceil_rat(window.lo[1]), y1 = floor_rat(window.hi[1]);
  if (x0 < 0 || y0 < 0 || x1 > g.spec().N || y1 > g.spec().N) throw Error(Errc::OutOfRange, "window");
  const Integer w = x1 - x0 + 1, h = y1 - y0 + 1;
  if (w <= 0 || h <= 0 || w * h > 1000000) throw Error(Errc::WindowTooLarge, "window must hold 1..10^6 points");
  const long W = w.get_si(), H = h.get_si();
  const int cell = 12;
  std::ofstream os(path);
  if (!os) throw Error(Errc::IoError, "cannot write " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W * cell << "\" height=\"" << H * cell
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  static const char* fill[] = {"#d62728", "#ff7f0e", "#222222", "#2ca02c", "#1f77b4"};
  for (long a = 0; a < W; ++a)
    for (long b = 0; b < H; ++b) {
      const std::int64_t x = x0.get_si() + a, y = y0.get_si() + b;
      PointData pd = g.point_data(x, y);
      const double cx = a * cell + cell / 2.0, cy = (H - 1 - b) * cell + cell / 2.0;
      double dx = 0, dy = 0;
      switch (pd.arrow) {
        case Arrow::Left: dx = -1; break;
        case Arrow::Right: dx = 1; break;
        case Arrow::Up: dy = -1; break;
        case Arrow::Down: dy = 1; break;
      }
      const char* col = fill[static_cast<int>(pd.color)];
      os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"1.5\" fill=\"" << col << "\"/>"
         << "<line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << cx + dx * cell * 0.4 << "\" y2=\""
         << cy + dy * cell * 0.4 << "\" stroke=\"" << col << "\" stroke-width=\"1\"/>\n";
    }
  os << "</svg>\n";
}

}  // namespace cls
