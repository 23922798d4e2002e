#include "cls/square_verifier.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <sys/wait.h>

namespace cls {

const char* side_name(Side s) {
  switch (s) {
    case Side::Left: return "L";
    case Side::Right: return "R";
    case Side::Bottom: return "B";
    case Side::Top: return "T";
  }
  return "?";
}

namespace {

constexpr int kColors = 5;
const std::pair<int, int> kCorner[4] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};

std::pair<int, int> slope(Color c) {
  switch (c) {
    case Color::Red: return {1, -1};
    case Color::Orange: return {-1, -1};
    case Color::Black: return {1, 1};
    case Color::Green: return {-1, -1};
    case Color::Blue: return {1, -1};
  }
  return {0, 0};
}

// offset of the corner value above the colour's minimum over the square
int corner_offset(Color c, int i, int j) {
  auto [sx, sy] = slope(c);
  int mn = 0;
  for (auto [a, b] : kCorner) mn = std::min(mn, sx * a + sy * b);
  return sx * i + sy * j - mn;
}

std::pair<int, int> argmin_corner(Color c) {
  auto [sx, sy] = slope(c);
  std::pair<int, int> best{0, 0};
  for (auto [a, b] : kCorner)
    if (sx * a + sy * b < sx * best.first + sy * best.second) best = {a, b};
  return best;
}

Color color_from(const std::string& s) {
  for (int c = 0; c < kColors; ++c)
    if (s == color_name(static_cast<Color>(c))) return static_cast<Color>(c);
  throw Error(Errc::ParseError, "unknown colour '" + s + "'");
}

Arrow arrow_from(const std::string& s) {
  for (int a = 0; a < 4; ++a)
    if (s == arrow_name(static_cast<Arrow>(a))) return static_cast<Arrow>(a);
  throw Error(Errc::ParseError, "unknown arrow '" + s + "'");
}

// present colour range [lo, hi] in value order, or nullopt
std::pair<int, int> color_range(const Archetype& a) {
  int lo = kColors, hi = -1;
  for (const auto& d : a.corners) {
    lo = std::min(lo, static_cast<int>(d.color));
    hi = std::max(hi, static_cast<int>(d.color));
  }
  return {lo, hi};
}

bool present(const Archetype& a, int c) {
  for (const auto& d : a.corners)
    if (static_cast<int>(d.color) == c) return true;
  return false;
}

}  // namespace

std::string Archetype::canonical_key() const {
  std::string k;
  for (int i = 0; i < 4; ++i) {
    if (i) k += '.';
    k += color_name(corners[i].color);
    k += '-';
    k += arrow_name(corners[i].arrow);
  }
  if (boundary) {
    k += "_at";
    k += side_name(*boundary);
  }
  return k;
}

Archetype Archetype::parse_key(const std::string& key) {
  Archetype a;
  std::string body = key;
  if (auto p = key.find("_at"); p != std::string::npos) {
    body = key.substr(0, p);
    const std::string s = key.substr(p + 3);
    bool ok = false;
    for (Side sd : {Side::Left, Side::Right, Side::Bottom, Side::Top})
      if (s == side_name(sd)) {
        a.boundary = sd;
        ok = true;
      }
    if (!ok) throw Error(Errc::ParseError, "bad boundary in key " + key);
  }
  std::stringstream ss(body);
  std::string part;
  int i = 0;
  while (std::getline(ss, part, '.')) {
    const auto dash = part.find('-');
    if (i >= 4 || dash == std::string::npos) throw Error(Errc::ParseError, "bad archetype key " + key);
    a.corners[i++] = PointData{color_from(part.substr(0, dash)), arrow_from(part.substr(dash + 1))};
  }
  if (i != 4) throw Error(Errc::ParseError, "bad archetype key " + key);
  return a;
}

std::size_t Enumeration::interior() const {
  std::size_t n = 0;
  for (const auto& [a, t] : archetypes) n += !a.boundary;
  return n;
}

std::size_t Enumeration::boundary() const { return archetypes.size() - interior(); }

std::vector<std::string> all_origin_names() {
  std::vector<std::string> r;
  for (int t = 0; t < kBigTypeCount; ++t) r.push_back(big_type_name(static_cast<BigType>(t)));
  for (int t = 0; t < 14; ++t) r.push_back(med_type_name(static_cast<MedType>(t)));
  return r;
}

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }
std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

// Integer form of decode_solution at the square centre (x + 1/2, y + 1/2).
bool square_in_solution_region(const Grid& g, std::int64_t x, std::int64_t y) {
  const GridSpec& gs = g.spec();
  const std::int64_t s = gs.big_side;
  const std::int64_t v1 = g.big_index(x), v2 = g.big_index(y);
  if (v1 == v2 && check_eol(g.eol(), static_cast<std::uint64_t>(v1))) return true;
  const BigType t = g.big_square_type(v1, v2);
  if (t != BigType::LA && t != BigType::LB) return false;
  const std::int64_t i = x - (v1 - 1) * s, j = y - (v2 - 1) * s;
  // twice the local offsets, so the half-integer centre stays integral
  std::int64_t li2 = 2 * i + 1, lj2 = 2 * j + 1;
  if (t == BigType::LB) {
    li2 = 2 * s - li2;
    lj2 = 2 * s - lj2;
  }
  const std::int64_t dx2 = 2 * gs.lab_x0() - li2, dy2 = lj2 - 2 * gs.lab_y0();
  const std::int64_t M = std::int64_t{1} << gs.m;
  const std::int64_t u1 = ceil_div(dx2, 8), u2 = floor_div(dy2, 8) + 1;
  if (u1 < 1 || u1 > M || u2 < 1 || u2 > M || u1 != u2) return false;
  return check_iter(g.iter(), static_cast<std::uint64_t>(u1));
}

std::string point_origin(const Grid& g, std::int64_t x, std::int64_t y) {
  const GridSpec& gs = g.spec();
  const std::int64_t s = gs.big_side;
  const std::int64_t v1 = g.big_index(x), v2 = g.big_index(y);
  const BigType t = g.big_square_type(v1, v2);
  if (t == BigType::LA || t == BigType::LB) {
    std::int64_t i = x - (v1 - 1) * s, j = y - (v2 - 1) * s;
    if (t == BigType::LB) {
      i = s - i;
      j = s - j;
    }
    const std::int64_t M = std::int64_t{1} << gs.m;
    const std::int64_t dx = gs.lab_x0() - i, dy = j - gs.lab_y0();
    if (dx >= 1 && dx <= 4 * M && dy >= 0 && dy < 4 * M) {
      const std::int64_t u1 = (dx + 3) / 4, u2 = dy / 4 + 1;
      const int a = static_cast<int>(4 * u1 - dx), b = static_cast<int>(dy % 4);
      const MedType mt = g.medium_square_type(LabCase::A, u1, u2);
      if (medium_cell(static_cast<int>(mt) + 1, a, b)) {
        const LabCase lc = t == BigType::LA ? LabCase::A : LabCase::B;
        return med_type_name(g.medium_square_type(lc, u1, u2));
      }
    }
  }
  return big_type_name(t);
}

}  // namespace

bool in_solution_region(const Grid& g, std::int64_t x, std::int64_t y) { return square_in_solution_region(g, x, y); }

Enumeration enumerate_archetypes(const Grid& g) {
  const std::int64_t N = g.spec().N;
  Enumeration e;
  std::vector<PointData> lower(N + 1), upper(N + 1);
  std::vector<std::string> olow(N + 1), oup(N + 1);
  for (std::int64_t y = 0; y <= N; ++y) {
    lower[y] = g.point_data(0, y);
    olow[y] = point_origin(g, 0, y);
  }
  for (std::int64_t x = 0; x < N; ++x) {
    for (std::int64_t y = 0; y <= N; ++y) {
      upper[y] = g.point_data(x + 1, y);
      oup[y] = point_origin(g, x + 1, y);
    }
    for (std::int64_t y = 0; y < N; ++y) {
      Archetype a;
      a.corners = {lower[y], lower[y + 1], upper[y], upper[y + 1]};
      const bool sol = square_in_solution_region(g, x, y);
      std::vector<std::optional<Side>> variants{std::nullopt};
      if (x == 0) variants.push_back(Side::Left);
      if (x == N - 1) variants.push_back(Side::Right);
      if (y == 0) variants.push_back(Side::Bottom);
      if (y == N - 1) variants.push_back(Side::Top);
      for (const auto& v : variants) {
        a.boundary = v;
        auto [it, fresh] = e.archetypes.try_emplace(a);
        ArchetypeTags& t = it->second;
        if (fresh) {
          t.x = x;
          t.y = y;
        }
        (sol ? t.solution : t.nonsolution) += 1;
        for (const std::string* o : {&olow[y], &olow[y + 1], &oup[y], &oup[y + 1]}) {
          t.origins.insert(*o);
          e.origins_seen.insert(*o);
        }
      }
    }
    lower.swap(upper);
    olow.swap(oup);
  }
  return e;
}

void merge_enumeration(Enumeration& a, const Enumeration& b) {
  for (const auto& [k, t] : b.archetypes) {
    auto [it, fresh] = a.archetypes.try_emplace(k, t);
    if (fresh) continue;
    it->second.nonsolution += t.nonsolution;
    it->second.solution += t.solution;
    it->second.origins.insert(t.origins.begin(), t.origins.end());
  }
  a.origins_seen.insert(b.origins_seen.begin(), b.origins_seen.end());
}

ColorForm& ColorForm::operator+=(const ColorForm& o) {
  for (int i = 0; i < kColors; ++i) c[i] += o.c[i];
  k += o.k;
  return *this;
}

ColorForm ColorForm::operator*(const Rational& s) const {
  ColorForm r;
  for (int i = 0; i < kColors; ++i) r.c[i] = c[i] * s;
  r.k = k * s;
  return r;
}

Rational ColorForm::at(const std::array<Rational, 5>& colors) const {
  Rational r = k;
  for (int i = 0; i < kColors; ++i)
    if (c[i] != 0) r += c[i] * colors[i];
  return r;
}

bool ColorForm::color_free() const {
  for (const auto& v : c)
    if (v != 0) return false;
  return true;
}

SymbolicPatch symbolic_patch(const Archetype& a) {
  static constexpr int A[4][4] = {{1, 0, 0, 0}, {0, 0, 1, 0}, {-3, 3, -2, -1}, {2, -2, 1, 1}};
  ColorForm F[4][4];
  SymbolicPatch p;
  for (int q = 0; q < 4; ++q) {
    auto [i, j] = kCorner[q];
    const PointData& d = a.corners[q];
    ColorForm v;
    v.c[static_cast<int>(d.color)] = 1;
    v.k = corner_offset(d.color, i, j);
    p.corner_values[q] = v;
    auto [gx, gy] = arrow_gradient(d.arrow);
    F[i][j] = v;
    F[i][2 + j].k = gy;
    F[2 + i][j].k = gx;
  }
  ColorForm AF[4][4];
  for (int r = 0; r < 4; ++r)
    for (int q = 0; q < 4; ++q)
      for (int k = 0; k < 4; ++k)
        if (A[r][k]) AF[r][q] += F[k][q] * Rational(A[r][k]);
  for (int r = 0; r < 4; ++r)
    for (int q = 0; q < 4; ++q)
      for (int k = 0; k < 4; ++k)
        if (A[q][k]) p.f[r][q] += AF[r][k] * Rational(A[q][k]);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i) p.fx[i - 1][j] += p.f[i][j] * Rational(i);
      if (j) p.fy[i][j - 1] += p.f[i][j] * Rational(j);
    }
  return p;
}

std::array<Rational, 5> concrete_colors(const Archetype& a, std::int64_t x, std::int64_t y, std::int64_t N) {
  std::array<Rational, 5> r{};
  for (int c = 0; c < kColors; ++c) {
    if (!present(a, c)) continue;
    auto [i, j] = argmin_corner(static_cast<Color>(c));
    r[c] = regime_value(static_cast<Color>(c), Integer(static_cast<long>(x + i)), Integer(static_cast<long>(y + j)),
                        Integer(static_cast<long>(N)));
  }
  return r;
}

namespace {

Rational eval_poly(const std::array<std::array<ColorForm, 4>, 4>& p, const std::array<Rational, 5>& colors,
                   const Rational& x, const Rational& y) {
  Rational r = 0, xp = 1;
  for (int i = 0; i < 4; ++i, xp *= x) {
    Rational yp = 1;
    for (int j = 0; j < 4; ++j, yp *= y) {
      Rational c = p[i][j].at(colors);
      if (c != 0) r += c * xp * yp;
    }
  }
  return r;
}

}  // namespace

std::pair<Rational, Rational> eval_symbolic_grad(const SymbolicPatch& p, const std::array<Rational, 5>& colors,
                                                 const Rational& x, const Rational& y) {
  return {eval_poly(p.fx, colors, x, y), eval_poly(p.fy, colors, x, y)};
}

namespace {

std::string smt_rat(const Rational& r) {
  const Integer a = abs(r.get_num());
  std::string s = r.get_den() == 1 ? a.get_str() : "(/ " + a.get_str() + " " + r.get_den().get_str() + ")";
  return r < 0 ? "(- " + s + ")" : s;
}

std::string symbol(const Archetype& a, int c) {
  const std::string n = color_name(static_cast<Color>(c));
  return present(a, c) ? n : "fresh_" + n;
}

std::string smt_form(const Archetype& a, const ColorForm& f) {
  std::vector<std::string> terms;
  for (int c = 0; c < kColors; ++c) {
    if (f.c[c] == 0) continue;
    terms.push_back(f.c[c] == 1 ? symbol(a, c) : "(* " + smt_rat(f.c[c]) + " " + symbol(a, c) + ")");
  }
  if (f.k != 0 || terms.empty()) terms.push_back(smt_rat(f.k));
  if (terms.size() == 1) return terms[0];
  std::string s = "(+";
  for (auto& t : terms) s += " " + t;
  return s + ")";
}

std::string smt_poly(const Archetype& a, const std::array<std::array<ColorForm, 4>, 4>& p) {
  std::vector<std::string> terms;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const ColorForm& f = p[i][j];
      if (f.color_free() && f.k == 0) continue;
      std::string t = "(* " + smt_form(a, f);
      for (int q = 0; q < i; ++q) t += " x";
      for (int q = 0; q < j; ++q) t += " y";
      terms.push_back(i + j == 0 ? smt_form(a, f) : t + ")");
    }
  if (terms.empty()) return "0";
  if (terms.size() == 1) return terms[0];
  std::string s = "(+";
  for (auto& t : terms) s += "\n    " + t;
  return s + ")";
}

}  // namespace

std::string smtlib_script(const Archetype& a, const SmtOptions& opt) {
  const SymbolicPatch p = symbolic_patch(a);
  auto [lo, hi] = color_range(a);
  std::ostringstream os;
  os << "; archetype " << a.canonical_key() << "\n";
  os << "; corners (0,0) (0,1) (1,0) (1,1):";
  for (const auto& d : a.corners) os << " " << color_name(d.color) << "/" << arrow_name(d.arrow);
  os << "\n; sat means a near-stationary point exists in the square\n";
  os << "(set-logic QF_NRA)\n";
  for (int c = lo; c <= hi; ++c) os << "(declare-fun " << symbol(a, c) << " () Real)\n";
  os << "(declare-fun x () Real)\n(declare-fun y () Real)\n";
  for (int c = lo; c < hi; ++c)
    os << "(assert (> " << symbol(a, c) << " (+ " << symbol(a, c + 1) << " " << smt_rat(opt.gap) << ")))\n";
  os << "(define-fun fx () Real " << smt_poly(a, p.fx) << ")\n";
  os << "(define-fun fy () Real " << smt_poly(a, p.fy) << ")\n";
  const std::string e = smt_rat(opt.eps), me = smt_rat(-opt.eps);
  auto within = [&](const char* v) { return std::string("(<= ") + me + " " + v + " " + e + ")"; };
  auto range = [&](const char* v) { return std::string("(<= 0 ") + v + " 1)"; };
  if (!a.boundary) {
    os << "(assert " << range("x") << ")\n(assert " << range("y") << ")\n";
    os << "(assert " << within("fx") << ")\n(assert " << within("fy") << ")\n";
  } else {
    switch (*a.boundary) {
      case Side::Left:
        os << "(assert (= x 0))\n(assert " << range("y") << ")\n(assert (>= fx " << me << "))\n(assert "
           << within("fy") << ")\n";
        break;
      case Side::Right:
        os << "(assert (= x 1))\n(assert " << range("y") << ")\n(assert (<= fx " << e << "))\n(assert "
           << within("fy") << ")\n";
        break;
      case Side::Bottom:
        os << "(assert (= y 0))\n(assert " << range("x") << ")\n(assert (>= fy " << me << "))\n(assert "
           << within("fx") << ")\n";
        break;
      case Side::Top:
        os << "(assert (= y 1))\n(assert " << range("x") << ")\n(assert (<= fy " << e << "))\n(assert "
           << within("fx") << ")\n";
        break;
    }
  }
  os << "(check-sat)\n";
  return os.str();
}

void emit_smtlib(const Archetype& a, const SmtOptions& opt, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::IoError, "cannot write " + path);
  f << smtlib_script(a, opt);
  if (!f) throw Error(Errc::IoError, "write failed: " + path);
}

namespace {

bool near_stationary(const Archetype& a, const Rational& fx, const Rational& fy, const Rational& eps) {
  auto in = [&](const Rational& v) { return v >= -eps && v <= eps; };
  if (!a.boundary) return in(fx) && in(fy);
  switch (*a.boundary) {
    case Side::Left: return fx >= -eps && in(fy);
    case Side::Right: return fx <= eps && in(fy);
    case Side::Bottom: return fy >= -eps && in(fx);
    case Side::Top: return fy <= eps && in(fx);
  }
  return false;
}

bool near_stationary_d(const Archetype& a, double fx, double fy, double eps) {
  auto in = [&](double v) { return std::fabs(v) <= eps; };
  if (!a.boundary) return in(fx) && in(fy);
  switch (*a.boundary) {
    case Side::Left: return fx >= -eps && in(fy);
    case Side::Right: return fx <= eps && in(fy);
    case Side::Bottom: return fy >= -eps && in(fx);
    case Side::Top: return fy <= eps && in(fx);
  }
  return false;
}

}  // namespace

namespace {

struct DPoly {
  double c[4][4];
  double at(double x, double y) const {
    double r = 0, xp = 1;
    for (int u = 0; u < 4; ++u, xp *= x) {
      double yp = 1;
      for (int v = 0; v < 4; ++v, yp *= y) r += c[u][v] * xp * yp;
    }
    return r;
  }
  DPoly dx() const {
    DPoly d{};
    for (int u = 1; u < 4; ++u)
      for (int v = 0; v < 4; ++v) d.c[u - 1][v] = u * c[u][v];
    return d;
  }
  DPoly dy() const {
    DPoly d{};
    for (int u = 0; u < 4; ++u)
      for (int v = 1; v < 4; ++v) d.c[u][v - 1] = v * c[u][v];
    return d;
  }
};

DPoly numeric(const std::array<std::array<ColorForm, 4>, 4>& p, const std::array<Rational, 5>& col) {
  DPoly d{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) d.c[i][j] = p[i][j].at(col).get_d();
  return d;
}

Rational dyadic(double v) {
  const double scale = 1099511627776.0;  // 2^40
  return normalize(Integer(static_cast<long>(std::llround(std::clamp(v, 0.0, 1.0) * scale))),
                   Integer(1099511627776L));
}

// Newton on (f_x, f_y) = 0 from (x, y).  On a boundary archetype the
// boundary coordinate stays fixed and only the tangential partial is
// driven to zero.
std::pair<double, double> newton(const DPoly& fx, const DPoly& fy, double x, double y, std::optional<Side> side) {
  const DPoly fxx = fx.dx(), fxy = fx.dy(), fyy = fy.dy();
  for (int it = 0; it < 40; ++it) {
    const double gx = fx.at(x, y), gy = fy.at(x, y);
    if (!side) {
      const double a = fxx.at(x, y), b = fxy.at(x, y), c = fyy.at(x, y);
      const double det = a * c - b * b;
      if (std::fabs(det) < 1e-300) break;
      x -= (c * gx - b * gy) / det;
      y -= (a * gy - b * gx) / det;
    } else if (*side == Side::Left || *side == Side::Right) {
      const double c = fyy.at(x, y);
      if (std::fabs(c) < 1e-300) break;
      y -= gy / c;
    } else {
      const double a = fxx.at(x, y);
      if (std::fabs(a) < 1e-300) break;
      x -= gx / a;
    }
    x = std::clamp(x, 0.0, 1.0);
    y = std::clamp(y, 0.0, 1.0);
  }
  return {x, y};
}

}  // namespace

namespace {

std::vector<std::pair<int, int>> sample_points(const Archetype& a, int d) {
  std::vector<std::pair<int, int>> pts;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (a.boundary) {
        const Side s = *a.boundary;
        if ((s == Side::Left && i != 0) || (s == Side::Right && i != d - 1) || (s == Side::Bottom && j != 0) ||
            (s == Side::Top && j != d - 1))
          continue;
      }
      pts.push_back({i, j});
    }
  return pts;
}

std::optional<Counterexample> search(const Archetype& a, const SymbolicPatch& p, const std::array<Rational, 5>& col,
                                     const Rational& eps, int d, int newton_seeds,
                                     const std::vector<std::pair<int, int>>& pts) {
  const double eps_d = eps.get_d() + 1e-9;
  const DPoly fx = numeric(p.fx, col), fy = numeric(p.fy, col);
  auto confirm = [&](const Rational& x, const Rational& y) -> std::optional<Counterexample> {
    Counterexample ce;
    ce.x = x;
    ce.y = y;
    ce.colors = col;
    std::tie(ce.fx, ce.fy) = eval_symbolic_grad(p, col, x, y);
    if (near_stationary(a, ce.fx, ce.fy, eps)) return ce;
    return std::nullopt;
  };
  // (score, x, y): the smallest gradients seed the Newton refinement
  std::vector<std::tuple<double, double, double>> seeds;
  for (auto [i, j] : pts) {
    const double x = static_cast<double>(i) / (d - 1), y = static_cast<double>(j) / (d - 1);
    const double gx = fx.at(x, y), gy = fy.at(x, y);
    if (near_stationary_d(a, gx, gy, eps_d))
      if (auto ce = confirm(normalize(Integer(i), Integer(d - 1)), normalize(Integer(j), Integer(d - 1)))) return ce;
    if (newton_seeds > 0) seeds.emplace_back(std::max(std::fabs(gx), std::fabs(gy)), x, y);
  }
  const std::size_t k = std::min<std::size_t>(seeds.size(), static_cast<std::size_t>(std::max(newton_seeds, 0)));
  std::partial_sort(seeds.begin(), seeds.begin() + static_cast<long>(k), seeds.end());
  for (std::size_t s = 0; s < k; ++s) {
    auto [x, y] = newton(fx, fy, std::get<1>(seeds[s]), std::get<2>(seeds[s]), a.boundary);
    if (!near_stationary_d(a, fx.at(x, y), fy.at(x, y), eps_d)) continue;
    if (auto ce = confirm(dyadic(x), dyadic(y))) return ce;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Counterexample> find_near_stationary(const Archetype& a, const std::array<Rational, 5>& colors,
                                                   const Rational& eps, int density, int newton_seeds) {
  if (density < 2) throw Error(Errc::OutOfRange, "search needs density >= 2");
  return search(a, symbolic_patch(a), colors, eps, density, newton_seeds, sample_points(a, density));
}

std::optional<Counterexample> falsify_sample(const Archetype& a, const FalsifyOptions& opt) {
  if (opt.density < 2 || opt.color_trials < 1) throw Error(Errc::OutOfRange, "falsifier needs density >= 2");
  const SymbolicPatch p = symbolic_patch(a);
  auto [lo, hi] = color_range(a);
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> scale_pick(0, 4), frac(0, 63);
  const auto pts = sample_points(a, opt.density);
  for (int trial = 0; trial < opt.color_trials; ++trial) {
    // only differences between colours matter, so the lowest one is 0
    std::array<Rational, 5> col{};
    for (int c = hi - 1; c >= lo; --c) {
      Rational extra(1, 64);
      if (trial > 0) {
        // gaps range from just above the bound to several thousand
        static const int scales[] = {1, 8, 64, 512, 4096};
        extra += Rational(frac(rng) * scales[scale_pick(rng)], 64);
      }
      col[c] = col[c + 1] + opt.gap + extra;
    }
    if (auto ce = search(a, p, col, opt.eps, opt.density, opt.newton_seeds, pts)) return ce;
  }
  return std::nullopt;
}

std::vector<FalsifyRow> falsify_all_serial(const Enumeration& e, const FalsifyOptions& opt) {
  std::vector<FalsifyRow> rows;
  std::uint64_t k = 0;
  for (const auto& [a, t] : e.archetypes) {
    FalsifyOptions o = opt;
    o.seed = opt.seed + k++;
    rows.push_back({a, t.expect_sat(), falsify_sample(a, o)});
  }
  return rows;
}

std::vector<FalsifyRow> falsify_all_parallel(const Enumeration& e, const FalsifyOptions& opt) {
  std::vector<std::pair<Archetype, bool>> items;
  for (const auto& [a, t] : e.archetypes) items.push_back({a, t.expect_sat()});
  std::vector<FalsifyRow> rows(items.size());
  const long n = static_cast<long>(items.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    FalsifyOptions o = opt;
    o.seed = opt.seed + static_cast<std::uint64_t>(k);
    rows[k] = {items[k].first, items[k].second, falsify_sample(items[k].first, o)};
  }
  return rows;
}

bool corner_is_kkt(Arrow a, bool lo_x, bool lo_y, const Rational& eps) {
  auto [gx, gy] = arrow_gradient(a);
  const bool okx = lo_x ? gx >= -eps : gx <= eps;
  const bool oky = lo_y ? gy >= -eps : gy <= eps;
  return okx && oky;
}

bool corner_check(const Grid& g, const Rational& eps) {
  const std::int64_t N = g.spec().N;
  for (std::int64_t x : {std::int64_t{0}, N})
    for (std::int64_t y : {std::int64_t{0}, N})
      if (corner_is_kkt(g.point_data(x, y).arrow, x == 0, y == 0, eps)) return false;
  return true;
}

const char* smt_verdict_name(SmtVerdict v) {
  switch (v) {
    case SmtVerdict::Sat: return "sat";
    case SmtVerdict::Unsat: return "unsat";
    case SmtVerdict::Unknown: return "unknown";
    case SmtVerdict::Missing: return "missing";
  }
  return "?";
}

SmtVerdict parse_smt_output(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (line == "sat") return SmtVerdict::Sat;
    if (line == "unsat") return SmtVerdict::Unsat;
    return SmtVerdict::Unknown;
  }
  return SmtVerdict::Missing;
}

std::map<std::string, SmtVerdict> read_smt_results(const std::string& dir, const std::vector<std::string>& keys) {
  std::map<std::string, SmtVerdict> r;
  for (const auto& k : keys) {
    std::ifstream f(dir + "/" + k + ".result");
    if (!f) {
      r[k] = SmtVerdict::Missing;
      continue;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    r[k] = parse_smt_output(ss.str());
  }
  return r;
}

SmtVerdict run_smt_solver(const std::string& solver, const std::string& path, int timeout_s) {
  const std::string cmd = solver + " -T:" + std::to_string(timeout_s) + " '" + path + "' 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return SmtVerdict::Missing;
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) out += buf;
  const int rc = pclose(p);
  // 127: the shell could not find the solver
  if ((rc != 0 && out.empty()) || (WIFEXITED(rc) && WEXITSTATUS(rc) == 127)) return SmtVerdict::Missing;
  return parse_smt_output(out);
}

bool smt_solver_available(const std::string& solver) {
  const std::string cmd = "command -v " + solver + " >/dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

void export_smt(const Enumeration& e, const SmtOptions& opt, const std::string& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json man;
  man["eps"] = to_string(opt.eps);
  man["gap"] = to_string(opt.gap);
  man["interior"] = e.interior();
  man["boundary"] = e.boundary();
  auto& list = man["archetypes"] = nlohmann::ordered_json::array();
  for (const auto& [a, t] : e.archetypes) {
    const std::string key = a.canonical_key();
    emit_smtlib(a, opt, dir + "/" + key + ".smt2");
    nlohmann::ordered_json j;
    j["key"] = key;
    j["boundary"] = a.boundary ? side_name(*a.boundary) : "";
    j["expected"] = t.expect_sat() ? "sat" : "unsat";
    j["nonsolution_squares"] = t.nonsolution;
    j["solution_squares"] = t.solution;
    j["example"] = {t.x, t.y};
    j["origins"] = t.origins;
    list.push_back(j);
  }
  std::ofstream f(dir + "/manifest.json");
  if (!f) throw Error(Errc::IoError, "cannot write manifest in " + dir);
  f << man.dump(2) << "\n";
}

}  // namespace cls
