#include "cls/linear_approx.hpp"

#include "cls/builder.hpp"

#include <algorithm>

namespace cls {

SampleParams SampleParams::with_k(int n, int k) {
  SampleParams p;
  p.n = n;
  p.k = k;
  mpz_ui_pow_ui(p.N.get_mpz_t(), 2, static_cast<unsigned long>(k));
  p.sample_count = 2 * n + 1;
  p.spacing = 1 / (4 * Rational(n) * Rational(p.N));
  p.bad_threshold = 1 / (8 * Rational(n) * Rational(p.N));
  return p;
}

SampleParams SampleParams::make(int n, const Rational& L, const Rational& eps) {
  const Rational need = 4 * L / eps;
  int k = 0;
  while (pow2(k) < need) ++k;
  return with_k(n, k);
}

std::int64_t subcube_index(const Rational& x0, const Integer& N) {
  Rational x = x0 < 0 ? Rational(0) : (x0 > 1 ? Rational(1) : x0);
  Integer l = ceil_rat(x * Rational(N));
  if (l < 1) l = 1;
  return l.get_si();
}

CubeIndex subcube_index(const Vec& x, const Integer& N) {
  CubeIndex p;
  for (const auto& v : x) p.push_back(subcube_index(v, N));
  return p;
}

Vec subcube_centre(const CubeIndex& p, const Integer& N) {
  Vec c;
  for (auto v : p) c.push_back(Rational(2 * v - 1) / (2 * Rational(N)));
  return c;
}

SampleSet sample_set(const Vec& x, const SampleParams& p) {
  if (static_cast<int>(x.size()) != p.n) throw Error(Errc::DimensionMismatch, "sample_set");
  SampleSet s;
  const Vec e(x.size(), 1);
  for (int l = 0; l < p.sample_count; ++l) s.T.push_back(x + (l * p.spacing) * e);
  const Rational N(p.N), half = 1 / (2 * N);
  // breakpoints: the alpha in [0, 1/2N] where a coordinate meets an inner
  // boundary; I_N is constant between consecutive ones
  std::vector<Rational> alphas{half};
  for (const auto& xi : x) {
    Rational next = Rational(floor_rat(xi * N) + 1) / N;  // first boundary above floor
    for (const Rational& b : std::vector<Rational>{Rational(ceil_rat(xi * N)) / N, next}) {
      Rational a = b - xi;
      if (a >= 0 && a <= half && b > 0 && b < 1) alphas.push_back(a);
    }
  }
  for (const auto& a : alphas) s.S.insert(subcube_index(x + a * e, p.N));
  return s;
}

std::size_t bad_sample_count(const Vec& x, const SampleParams& p) {
  const Rational N(p.N);
  std::size_t bad = 0;
  for (const auto& y : sample_set(x, p).T) {
    bool is_bad = false;
    for (const auto& yi : y) {
      // nearest inner boundary
      Integer l = floor_rat(yi * N + Rational(1, 2));
      if (l < 1) l = 1;
      if (l > p.N - 1) l = p.N - 1;
      if (p.N > 1 && abs_rat(yi - Rational(l) / N) < p.bad_threshold) is_bad = true;
    }
    bad += is_bad;
  }
  return bad;
}

namespace {

int phi(Builder& b, int t, const SampleParams& p) {
  return b.min(b.constant(1), b.max(b.constant(0), b.mulc(8 * p.n * Rational(p.N), t)));
}

// b_1..b_k, most significant first
std::vector<int> extract_bits(Builder& b, int y, const SampleParams& p, int k) {
  std::vector<int> bits;
  int t = y;
  for (int j = 1; j <= k; ++j) {
    const Rational w = pow2(-j);
    int bj = phi(b, b.sub(t, b.constant(w)), p);
    bits.push_back(bj);
    t = b.sub(t, b.mulc(w, bj));
  }
  return bits;
}

std::vector<int> sort_network(Builder& b, std::vector<int> v) {
  const std::size_t n = v.size();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = r % 2; i + 1 < n; i += 2) {
      int lo = b.min(v[i], v[i + 1]), hi = b.max(v[i], v[i + 1]);
      v[i] = lo;
      v[i + 1] = hi;
    }
  return v;
}

}  // namespace

LinearCircuit phi_gadget(const SampleParams& p) {
  Builder b(1);
  return LinearCircuit(b.finish({phi(b, b.input(0), p)}));
}

LinearCircuit bit_extract_fragment(const SampleParams& p, int k) {
  Builder b(1);
  return LinearCircuit(b.finish(extract_bits(b, b.input(0), p, k)));
}

LinearCircuit median_network(int count) {
  if (count < 1 || count % 2 == 0) throw Error(Errc::EvenCount, "median needs an odd count");
  Builder b(count);
  std::vector<int> in;
  for (int i = 0; i < count; ++i) in.push_back(b.input(i));
  return LinearCircuit(b.finish(sort_network(b, in)));
}

LinearApprox approximate_circuit(const ArithCircuit& f, const Rational& L, const Rational& eps,
                                 const ApproxOptions& opt) {
  if (!is_well_behaved(f)) throw Error(Errc::IllBehavedInput, "approximate_circuit needs a well-behaved circuit");
  const int n = f.num_inputs;
  LinearApprox r;
  r.domain = opt.domain.dim() ? opt.domain : Box::unit(static_cast<std::size_t>(n));
  if (static_cast<int>(r.domain.dim()) != n) throw Error(Errc::DimensionMismatch, "approximation domain");
  Rational width = 0;
  for (int i = 0; i < n; ++i) width = std::max<Rational>(width, r.domain.hi[i] - r.domain.lo[i]);
  // f0(u) = f(lo + u (hi - lo)) on [0,1]^n is (width L)-Lipschitz in linf
  r.eps = eps;
  r.L = L;
  r.params = SampleParams::make(n, L * width, eps);
  const SampleParams& p = r.params;
  if (p.k * n > 20) throw Error(Errc::GuardExceeded, "grid of 2^" + std::to_string(p.k * n) + " cubes exceeds 2^20");
  const std::int64_t N = p.N.get_si();
  std::int64_t cells = 1;
  for (int i = 0; i < n; ++i) cells *= N;
  auto to_x = [&](const Vec& u) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = r.domain.lo[i] + u[i] * (r.domain.hi[i] - r.domain.lo[i]);
    return x;
  };
  const std::size_t d = f.outputs.size();
  std::vector<std::vector<Rational>> vals(d, std::vector<Rational>(static_cast<std::size_t>(cells)));
  Rational maxabs = 0;
  for (std::int64_t t = 0; t < cells; ++t) {
    CubeIndex q(n);
    std::int64_t rest = t;
    for (int i = 0; i < n; ++i) {
      q[i] = rest % N + 1;
      rest /= N;
    }
    Vec y = eval_arith(f, to_x(subcube_centre(q, p.N)));
    for (std::size_t o = 0; o < d; ++o) {
      vals[o][t] = y[o];
      maxabs = std::max<Rational>(maxabs, abs_rat(y[o]));
    }
  }
  r.M = opt.M ? *opt.M : Rational(ceil_rat(maxabs) + 1);
  if (r.M < maxabs) throw Error(Errc::OutOfRange, "supplied M is below a grid value");
  r.m = 1;
  while (pow2(r.m) < 32 * r.M / eps + 1) ++r.m;
  std::vector<BoolCircuit> Cb;
  for (std::size_t o = 0; o < d; ++o) {
    std::vector<std::uint64_t> table(static_cast<std::size_t>(cells));
    for (std::int64_t t = 0; t < cells; ++t) {
      Integer c = floor_rat((vals[o][t] + r.M) * 16 / eps) + 1;
      table[t] = c.get_ui();
    }
    r.C.push_back(table);
    std::vector<std::uint64_t> enc(table.size());
    for (std::size_t t = 0; t < table.size(); ++t) enc[t] = table[t] - 1;
    Cb.push_back(table_to_bool(enc, p.k * n, r.m));
  }

  Builder b(n);
  std::vector<int> u(n);
  for (int i = 0; i < n; ++i) {
    const Rational w = r.domain.hi[i] - r.domain.lo[i];
    u[i] = b.clamp(b.lincomb({{1 / w, b.input(i)}}, -r.domain.lo[i] / w), 0, 1);
  }
  std::vector<std::vector<int>> sample_bits;  // per sample, little-endian bits of (p - 1) for all coordinates
  for (int l = 0; l < p.sample_count; ++l) {
    std::vector<int> bits;
    for (int i = 0; i < n; ++i) {
      int y = b.min(b.constant(1), b.add(u[i], b.constant(l * p.spacing)));
      auto msb = extract_bits(b, y, p, p.k);
      bits.insert(bits.end(), msb.rbegin(), msb.rend());
    }
    sample_bits.push_back(bits);
  }
  std::vector<int> outs;
  for (std::size_t o = 0; o < d; ++o) {
    std::vector<int> V;
    for (const auto& bits : sample_bits) V.push_back(b.add(b.from_bits(b.inline_bool(Cb[o], bits)), b.constant(1)));
    int med = sort_network(b, V)[static_cast<std::size_t>(n)];
    outs.push_back(b.lincomb({{eps / 16, med}}, -eps / 16 - r.M));
  }
  r.F = LinearCircuit(b.finish(outs));
  return r;
}

Vec violation_witness(const ArithCircuit& f, const Vec& x, const SampleParams& p, const Rational& L,
                      const Rational& eps) {
  const Vec fx = eval_arith(f, x);
  auto dist = [&](const Vec& fy) {
    Rational m = 0;
    for (std::size_t o = 0; o < fx.size(); ++o) m = std::max<Rational>(m, abs_rat(fx[o] - fy[o]));
    return m;
  };
  std::optional<Vec> best;
  Rational best_d = -1;
  for (const auto& q : sample_set(x, p).S) {
    Vec c = subcube_centre(q, p.N);
    Rational dd = dist(eval_arith(f, c));
    if (dd > best_d) {
      best_d = dd;
      best = c;
    }
  }
  if (!best || !(best_d > L * norm(x - *best, NormKind::linf) + eps / 2))
    throw Error(Errc::NoWitness, "no Lipschitz violation near x");
  return *best;
}

Vec fd_gradient(const std::function<Rational(const Vec&)>& f, const Vec& x, const Rational& h) {
  if (h <= 0) throw Error(Errc::OutOfRange, "finite-difference step must be positive");
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec a = x, c = x;
    a[i] += h;
    c[i] -= h;
    g[i] = (f(a) - f(c)) / (2 * h);
  }
  return g;
}

namespace {

const __int128 kLimit = static_cast<__int128>(1) << 120;

bool to_i128(const Integer& z, __int128& out) {
  if (mpz_sizeinbase(z.get_mpz_t(), 2) > 124) return false;
  Integer a = abs(z);
  Integer hi = a >> 64, lo = a - (hi << 64);
  unsigned __int128 v = (static_cast<unsigned __int128>(hi.get_ui()) << 64) | lo.get_ui();
  out = z < 0 ? -static_cast<__int128>(v) : static_cast<__int128>(v);
  return true;
}

Integer from_i128(__int128 v) {
  bool neg = v < 0;
  unsigned __int128 a = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  Integer z = Integer(static_cast<unsigned long>(a >> 64));
  z <<= 64;
  z += Integer(static_cast<unsigned long>(a & ~0ULL));
  return neg ? Integer(-z) : z;
}

Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

}  // namespace

ScaledLinearEval::ScaledLinearEval(const LinearCircuit& lc, const Integer& input_den, const Box& box) {
  const ArithCircuit& c = lc.circuit();
  const std::size_t G = c.gates.size();
  std::vector<Integer> den(G);
  std::vector<Rational> lo(G), hi(G);
  D_ = input_den;
  for (std::size_t i = 0; i < G; ++i) {
    const Gate& g = c.gates[i];
    switch (g.op) {
      case Op::Input: den[i] = input_den; lo[i] = box.lo[g.a]; hi[i] = box.hi[g.a]; break;
      case Op::Const: den[i] = g.c.get_den(); lo[i] = hi[i] = g.c; break;
      case Op::Add: den[i] = lcm(den[g.a], den[g.b]); lo[i] = lo[g.a] + lo[g.b]; hi[i] = hi[g.a] + hi[g.b]; break;
      case Op::Sub: den[i] = lcm(den[g.a], den[g.b]); lo[i] = lo[g.a] - hi[g.b]; hi[i] = hi[g.a] - lo[g.b]; break;
      case Op::Max:
        den[i] = lcm(den[g.a], den[g.b]);
        lo[i] = std::max(lo[g.a], lo[g.b]);
        hi[i] = std::max(hi[g.a], hi[g.b]);
        break;
      case Op::Min:
        den[i] = lcm(den[g.a], den[g.b]);
        lo[i] = std::min(lo[g.a], lo[g.b]);
        hi[i] = std::min(hi[g.a], hi[g.b]);
        break;
      case Op::MulC: {
        den[i] = den[g.a] * g.c.get_den();
        Rational x = g.c * lo[g.a], y = g.c * hi[g.a];
        lo[i] = std::min(x, y);
        hi[i] = std::max(x, y);
        break;
      }
      default: return;  // not linear
    }
    D_ = lcm(D_, den[i]);
    if (mpz_sizeinbase(D_.get_mpz_t(), 2) > 80) return;
  }
  const Rational DR(D_);
  gates_.resize(G);
  for (std::size_t i = 0; i < G; ++i) {
    const Gate& g = c.gates[i];
    const Rational bound = std::max(abs_rat(lo[i]), abs_rat(hi[i])) * DR;
    if (bound >= pow2(118)) return;
    auto& s = gates_[i];
    s.op = g.op;
    s.a = g.a;
    s.b = g.b;
    s.p = s.q = 0;
    if (g.op == Op::Const) {
      if (!to_i128(Integer(g.c * DR), s.p)) return;
    } else if (g.op == Op::MulC) {
      const Rational in_bound = std::max(abs_rat(lo[g.a]), abs_rat(hi[g.a])) * DR;
      if (in_bound * abs_rat(Rational(g.c.get_num())) >= pow2(124)) return;
      if (!to_i128(g.c.get_num(), s.p) || !to_i128(g.c.get_den(), s.q)) return;
    }
  }
  outputs_ = c.outputs;
  ok_ = true;
}

Vec ScaledLinearEval::eval(const Vec& x) const {
  if (!ok_) throw Error(Errc::OutOfRange, "scaled evaluator unavailable for this circuit");
  std::vector<__int128> v(gates_.size());
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const auto& g = gates_[i];
    switch (g.op) {
      case Op::Input: {
        Rational s = x[g.a] * Rational(D_);
        if (s.get_den() != 1 || !to_i128(s.get_num(), v[i]))
          throw Error(Errc::OutOfRange, "input denominator does not divide the evaluator's");
        break;
      }
      case Op::Const: v[i] = g.p; break;
      case Op::Add: v[i] = v[g.a] + v[g.b]; break;
      case Op::Sub: v[i] = v[g.a] - v[g.b]; break;
      case Op::Max: v[i] = std::max(v[g.a], v[g.b]); break;
      case Op::Min: v[i] = std::min(v[g.a], v[g.b]); break;
      case Op::MulC: v[i] = v[g.a] * g.p / g.q; break;
      default: break;
    }
  }
  Vec out;
  for (int o : outputs_) out.push_back(normalize(from_i128(v[o]), D_));
  return out;
}

GdFdParams gd_fd_params(const Rational& eps, const Rational& eta, const Rational& L) {
  GdFdParams p;
  p.eps = eps / 4;
  p.h = std::min<Rational>(1, eps / (8 * eta * L * L));
  p.delta = std::min<Rational>(eps / 4, L * p.h * p.h / 2);
  return p;
}

Rational GdFdInstance::eval_F(const Vec& x) const { return eval_linear(approx.F, x)[0]; }

GdFdInstance gd_fd_instance(const GdInstance& src, const std::optional<Rational>& M) {
  const std::size_t n = src.domain.dim();
  if (src.mode != GdMode::LocalSearch) throw Error(Errc::InvalidInstance, "GD-FD reduces from LocalSearch");
  if (!src.domain.is_box() || !(src.domain.box == Box::unit(n)))
    throw Error(Errc::InvalidInstance, "GD-FD needs domain [0,1]^n");
  GdFdParams q = gd_fd_params(src.eps, src.eta, src.L);
  GdFdInstance r;
  r.eps = q.eps;
  r.eta = src.eta;
  r.h = q.h;
  r.domain = src.domain;
  ApproxOptions opt;
  opt.M = M;
  opt.domain = Box::cube(n, -1, 2);
  r.approx = approximate_circuit(src.f, src.L, q.delta, opt);
  return r;
}

bool check_gd_fd(const GdFdInstance& inst, const Vec& x) {
  if (!inst.domain.contains(x)) throw Error(Errc::PointOutsideDomain, "check_gd_fd");
  auto F = [&](const Vec& p) { return inst.eval_F(p); };
  Vec y = project(inst.domain, x - inst.eta * fd_gradient(F, x, inst.h));
  return F(y) >= F(x) - inst.eps;
}

GdFdRun gd_fd_solve(const GdFdInstance& inst, const Vec& start, std::uint64_t max_iters) {
  if (!inst.domain.contains(start)) throw Error(Errc::StartOutsideDomain, "gd_fd_solve start");
  auto F = [&](const Vec& p) { return inst.eval_F(p); };
  GdFdRun r;
  r.x = start;
  for (r.iters = 0; r.iters <= max_iters; ++r.iters) {
    Vec y = project(inst.domain, r.x - inst.eta * fd_gradient(F, r.x, inst.h));
    if (F(y) >= F(r.x) - inst.eps) {
      r.stopped = true;
      return r;
    }
    r.x = std::move(y);
  }
  return r;
}

}  // namespace cls
