#include "cls/scans.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace cls {

IntPatch IntPatch::make(const Grid& g, std::int64_t x, std::int64_t y) {
  static constexpr int A[4][4] = {{1, 0, 0, 0}, {0, 0, 1, 0}, {-3, 3, -2, -1}, {2, -2, 1, 1}};
  const std::int64_t N = g.spec().N;
  __int128 F[4][4] = {};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const PointData d = g.point_data(x + i, y + j);
      F[i][j] = 2 * regime_value_i64(d.color, x + i, y + j, N);
      // twice the prescribed partials: the arrow gives -1/2 times its direction
      switch (d.arrow) {
        case Arrow::Left: F[2 + i][j] = 1; break;
        case Arrow::Right: F[2 + i][j] = -1; break;
        case Arrow::Up: F[i][2 + j] = -1; break;
        case Arrow::Down: F[i][2 + j] = 1; break;
      }
    }
  __int128 AF[4][4] = {};
  for (int r = 0; r < 4; ++r)
    for (int q = 0; q < 4; ++q)
      for (int k = 0; k < 4; ++k) AF[r][q] += A[r][k] * F[k][q];
  IntPatch p{};
  for (int r = 0; r < 4; ++r)
    for (int q = 0; q < 4; ++q)
      for (int k = 0; k < 4; ++k) p.a2[r][q] += AF[r][k] * A[q][k];
  return p;
}

void IntPatch::eval_quarter(int p, int q, __int128& f, __int128& fx, __int128& fy) const {
  // u^i = p^i 4^-i; scaling f by 2 * 4^6 leaves p^i 4^(3-i) q^j 4^(3-j)
  __int128 P[4], Q[4], P4[4];
  P[0] = Q[0] = P4[0] = 1;
  for (int i = 1; i < 4; ++i) {
    P[i] = P[i - 1] * p;
    Q[i] = Q[i - 1] * q;
    P4[i] = P4[i - 1] * 4;
  }
  f = fx = fy = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const __int128 a = a2[i][j];
      if (!a) continue;
      f += a * P[i] * P4[3 - i] * Q[j] * P4[3 - j];
      // f_x scaled by 2 * 4^5: i a u^(i-1) w^j
      if (i) fx += i * a * P[i - 1] * P4[3 - i] * Q[j] * P4[3 - j];
      if (j) fy += j * a * P[i] * P4[3 - i] * Q[j - 1] * P4[3 - j];
    }
}

namespace {

RegimeScanResult regime_column(const Grid& g, std::int64_t x, std::int64_t min_required) {
  const std::int64_t N = g.spec().N;
  RegimeScanResult r;
  r.min_gap = INT64_MAX;
  const std::int64_t sx = std::min(x, N - 1);
  const int p = static_cast<int>(4 * (x - sx));
  for (std::int64_t y = 0; y <= N; ++y) {
    ++r.points;
    const std::int64_t sy = std::min(y, N - 1);
    const IntPatch patch = IntPatch::make(g, sx, sy);
    __int128 f, fx, fy;
    patch.eval_quarter(p, static_cast<int>(4 * (y - sy)), f, fx, fy);
    const PointData d = g.point_data(x, y);
    if (f != static_cast<__int128>(regime_value_i64(d.color, x, y, N)) * 8192) ++r.value_mismatches;
    auto [gx, gy] = arrow_gradient(d.arrow);
    if (normalize(Integer(static_cast<long>(fx)), 2048) != gx || normalize(Integer(static_cast<long>(fy)), 2048) != gy)
      ++r.arrow_mismatches;
    std::int64_t prev = regime_value_i64(Color::Red, x, y, N);
    for (Color c : {Color::Orange, Color::Black, Color::Green, Color::Blue}) {
      const std::int64_t v = regime_value_i64(c, x, y, N);
      r.min_gap = std::min(r.min_gap, prev - v);
      if (prev - v < min_required) ++r.gap_violations;
      prev = v;
    }
  }
  return r;
}

void merge(RegimeScanResult& a, const RegimeScanResult& b) {
  a.points += b.points;
  a.value_mismatches += b.value_mismatches;
  a.arrow_mismatches += b.arrow_mismatches;
  a.gap_violations += b.gap_violations;
  a.min_gap = std::min(a.min_gap, b.min_gap);
}

struct Eps {
  __int128 num, den;  // compare den * |v| <= num * scale
};

bool within(__int128 v, const Eps& e, __int128 scale) {
  return e.den * (v < 0 ? -v : v) <= e.num * scale;
}
bool at_least_minus(__int128 v, const Eps& e, __int128 scale) { return e.den * v >= -e.num * scale; }
bool at_most(__int128 v, const Eps& e, __int128 scale) { return e.den * v <= e.num * scale; }

bool box_kkt_linf(const Rational& gx, const Rational& gy, const Vec& pt, const Rational& N, const Rational& eps) {
  auto ok = [&](const Rational& g, const Rational& v) {
    if (v == 0) return g >= -eps;
    if (v == N) return g <= eps;
    return g >= -eps && g <= eps;
  };
  return ok(gx, pt[0]) && ok(gy, pt[1]);
}

// Newton on the gradient of the patch, in doubles, from (u, w).  Returns the
// final point and the linf norm of the gradient there.
std::tuple<double, double, double> refine(const IntPatch& patch, double u, double w) {
  double a[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = static_cast<double>(patch.a2[i][j]) / 2;
  auto deriv = [&](int di, int dj, double x, double y) {
    double r = 0;
    for (int i = di; i < 4; ++i)
      for (int j = dj; j < 4; ++j) {
        double c = a[i][j];
        for (int k = 0; k < di; ++k) c *= i - k;
        for (int k = 0; k < dj; ++k) c *= j - k;
        r += c * std::pow(x, i - di) * std::pow(y, j - dj);
      }
    return r;
  };
  for (int it = 0; it < 40; ++it) {
    const double gx = deriv(1, 0, u, w), gy = deriv(0, 1, u, w);
    const double h11 = deriv(2, 0, u, w), h12 = deriv(1, 1, u, w), h22 = deriv(0, 2, u, w);
    const double det = h11 * h22 - h12 * h12;
    if (std::fabs(det) < 1e-300) break;
    u = std::clamp(u - (h22 * gx - h12 * gy) / det, 0.0, 1.0);
    w = std::clamp(w - (h11 * gy - h12 * gx) / det, 0.0, 1.0);
  }
  return {u, w, std::max(std::fabs(deriv(1, 0, u, w)), std::fabs(deriv(0, 1, u, w)))};
}

Rational dyadic40(double v) {
  return normalize(Integer(static_cast<long>(std::llround(v * 1099511627776.0))), Integer(1099511627776L));
}

void record_hit(const Grid& g, DecoderScanResult& r, const Vec& pt) {
  ++r.hits;
  const DecodeResult d = decode_solution(g, pt, false);
  const std::string s = d.describe();
  ++r.by_decode[s];
  if (d.kind == DecodeKind::NotInSolutionRegion) {
    ++r.unsound;
    if (r.first_unsound.size() < 16) r.first_unsound.push_back({to_string(pt[0]), to_string(pt[1]), s});
  }
}

DecoderScanResult decoder_column(const Grid& g, std::int64_t x, const Eps& e, const Rational& eps) {
  const std::int64_t N = g.spec().N;
  const Rational NR(static_cast<long>(N));
  const double eps_d = eps.get_d() * 1.001;
  DecoderScanResult r;
  const int pmax = x == N - 1 ? 4 : 3;
  for (std::int64_t y = 0; y < N; ++y) {
    ++r.squares;
    const IntPatch patch = IntPatch::make(g, x, y);
    const int qmax = y == N - 1 ? 4 : 3;
    bool lattice_hit = false;
    double best = 1e300;
    int bp = 0, bq = 0;
    for (int p = 0; p <= pmax; ++p)
      for (int q = 0; q <= qmax; ++q) {
        ++r.points;
        __int128 f, fx, fy;
        patch.eval_quarter(p, q, f, fx, fy);
        const double score = std::max(std::fabs(static_cast<double>(fx)), std::fabs(static_cast<double>(fy)));
        if (score < best) {
          best = score;
          bp = p;
          bq = q;
        }
        const std::int64_t X4 = 4 * x + p, Y4 = 4 * y + q;
        const bool lox = X4 == 0, hix = X4 == 4 * N, loy = Y4 == 0, hiy = Y4 == 4 * N;
        const bool okx = lox ? at_least_minus(fx, e, 2048) : hix ? at_most(fx, e, 2048) : within(fx, e, 2048);
        const bool oky = loy ? at_least_minus(fy, e, 2048) : hiy ? at_most(fy, e, 2048) : within(fy, e, 2048);
        if (!okx || !oky) continue;
        lattice_hit = true;
        record_hit(g, r, {normalize(Integer(static_cast<long>(X4)), 4), normalize(Integer(static_cast<long>(Y4)), 4)});
      }
    if (lattice_hit) continue;
    // one refinement per square from its best lattice point
    ++r.refined;
    auto [u, w, gn] = refine(patch, bp / 4.0, bq / 4.0);
    if (!(gn <= eps_d)) continue;
    const Vec pt{Rational(static_cast<long>(x)) + dyadic40(u), Rational(static_cast<long>(y)) + dyadic40(w)};
    const ValueGrad vg = eval_direct(g, pt);
    if (box_kkt_linf(vg.grad[0], vg.grad[1], pt, NR, eps)) {
      ++r.refined_hits;
      record_hit(g, r, pt);
    }
  }
  return r;
}

void merge(DecoderScanResult& a, const DecoderScanResult& b) {
  a.squares += b.squares;
  a.points += b.points;
  a.hits += b.hits;
  a.refined += b.refined;
  a.refined_hits += b.refined_hits;
  for (const auto& [k, v] : b.by_decode) a.by_decode[k] += v;
  a.unsound += b.unsound;
  for (const auto& h : b.first_unsound)
    if (a.first_unsound.size() < 16) a.first_unsound.push_back(h);
}

Eps make_eps(const Rational& eps) {
  if (eps <= 0) throw Error(Errc::OutOfRange, "scan eps must be positive");
  if (mpz_sizeinbase(eps.get_num().get_mpz_t(), 2) > 60 || mpz_sizeinbase(eps.get_den().get_mpz_t(), 2) > 60)
    throw Error(Errc::GuardExceeded, "scan eps needs numerator and denominator below 2^60");
  return {eps.get_num().get_si(), eps.get_den().get_si()};
}

}  // namespace

RegimeScanResult regime_scan_serial(const Grid& g, std::int64_t min_required) {
  RegimeScanResult r;
  r.min_gap = INT64_MAX;
  for (std::int64_t x = 0; x <= g.spec().N; ++x) merge(r, regime_column(g, x, min_required));
  return r;
}

RegimeScanResult regime_scan_parallel(const Grid& g, std::int64_t min_required) {
  const std::int64_t N = g.spec().N;
  std::vector<RegimeScanResult> cols(N + 1);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t x = 0; x <= N; ++x) cols[x] = regime_column(g, x, min_required);
  RegimeScanResult r;
  r.min_gap = INT64_MAX;
  for (const auto& c : cols) merge(r, c);
  return r;
}

DecoderScanResult decoder_scan_serial(const Grid& g, const Rational& eps) {
  const Eps e = make_eps(eps);
  DecoderScanResult r;
  for (std::int64_t x = 0; x < g.spec().N; ++x) merge(r, decoder_column(g, x, e, eps));
  return r;
}

DecoderScanResult decoder_scan_parallel(const Grid& g, const Rational& eps) {
  const Eps e = make_eps(eps);
  const std::int64_t N = g.spec().N;
  std::vector<DecoderScanResult> cols(N);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t x = 0; x < N; ++x) cols[x] = decoder_column(g, x, e, eps);
  DecoderScanResult r;
  for (const auto& c : cols) merge(r, c);
  return r;
}

std::optional<Vec> locate_stationary(const Grid& g, std::int64_t x, std::int64_t y, const Rational& tol) {
  const IntPatch ip = IntPatch::make(g, x, y);
  const PatchCoeffs pc = square_patch(g, x, y);
  const Integer den = Integer(1) << 128;
  auto linf = [](const Vec& v) { return std::max<Rational>(abs_rat(v[0]), abs_rat(v[1])); };
  auto pow_rat = [](const Rational& b, int e) {
    Rational r = 1;
    for (int k = 0; k < e; ++k) r *= b;
    return r;
  };
  for (int s = 0; s < 25; ++s) {
    auto [u0, w0, gn] = refine(ip, (s / 5) / 4.0, (s % 5) / 4.0);
    if (!(gn < 1e-6)) continue;
    Rational u = dyadic40(u0), w = dyadic40(w0);
    for (int it = 0; it < 8; ++it) {
      const ValueGrad vg = eval_patch(pc, u, w);
      if (linf(vg.grad) <= tol) {
        if (u < 0 || u > 1 || w < 0 || w > 1) break;
        return Vec{u + static_cast<long>(x), w + static_cast<long>(y)};
      }
      Rational h11 = 0, h12 = 0, h22 = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          const Rational& a = pc.a[i][j];
          if (a == 0) continue;
          if (i >= 2) h11 += i * (i - 1) * a * pow_rat(u, i - 2) * pow_rat(w, j);
          if (i >= 1 && j >= 1) h12 += i * j * a * pow_rat(u, i - 1) * pow_rat(w, j - 1);
          if (j >= 2) h22 += j * (j - 1) * a * pow_rat(u, i) * pow_rat(w, j - 2);
        }
      const Rational det = h11 * h22 - h12 * h12;
      if (det == 0) break;
      u = round_to_denominator(u - (h22 * vg.grad[0] - h12 * vg.grad[1]) / det, den);
      w = round_to_denominator(w - (h11 * vg.grad[1] - h12 * vg.grad[0]) / det, den);
    }
  }
  return std::nullopt;
}

}  // namespace cls
