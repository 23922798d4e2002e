#include "cls/layout.hpp"

#include <algorithm>

namespace cls {

const char* color_name(Color c) {
  switch (c) {
    case Color::Red: return "red";
    case Color::Orange: return "orange";
    case Color::Black: return "black";
    case Color::Green: return "green";
    case Color::Blue: return "blue";
  }
  return "?";
}

const char* arrow_name(Arrow a) {
  switch (a) {
    case Arrow::Left: return "L";
    case Arrow::Right: return "R";
    case Arrow::Up: return "U";
    case Arrow::Down: return "D";
  }
  return "?";
}

Color swap_color(Color c) {
  switch (c) {
    case Color::Green: return Color::Orange;
    case Color::Orange: return Color::Green;
    case Color::Blue: return Color::Red;
    case Color::Red: return Color::Blue;
    default: return c;
  }
}

const char* big_type_name(BigType t) {
  static const char* names[] = {"G1", "G2", "G3", "G4", "G5", "G6", "G7", "O1", "O2", "O3",
                                "O4", "O5", "O6", "O7", "E1", "E2", "S",  "LA", "LB"};
  return names[static_cast<int>(t)];
}

const char* med_type_name(MedType t) {
  static const char* names[] = {"LA1", "LA2", "LA3", "LA4", "LA5", "LA6", "LA7",
                                "LB1", "LB2", "LB3", "LB4", "LB5", "LB6", "LB7"};
  return names[static_cast<int>(t)];
}

GridSpec GridSpec::make(int n, int m) {
  if (n < 1 || m < 1 || n + m + 4 > 56) throw Error(Errc::GuardExceeded, "grid needs n,m >= 1 and n+m+4 <= 56");
  GridSpec g;
  g.n = n;
  g.m = m;
  g.big_side = std::int64_t{1} << (m + 4);
  g.lab_side = std::int64_t{1} << (m + 2);
  g.N = g.big_side << n;
  return g;
}

BaseTemplate base_template(BigType t) {
  switch (t) {
    case BigType::G1: case BigType::O1: return BaseTemplate::G1;
    case BigType::G2: case BigType::O2: return BaseTemplate::G2;
    case BigType::G3: case BigType::O3: return BaseTemplate::G3;
    case BigType::G4: case BigType::O4: return BaseTemplate::G4;
    case BigType::G5: case BigType::O5: return BaseTemplate::G5;
    case BigType::G6: case BigType::O6: return BaseTemplate::G6;
    case BigType::G7: case BigType::O7: return BaseTemplate::G7;
    case BigType::E1: return BaseTemplate::E1;
    case BigType::E2: return BaseTemplate::E2;
    case BigType::S: return BaseTemplate::S;
    case BigType::LA: case BigType::LB: return BaseTemplate::LA;
  }
  return BaseTemplate::E1;
}

bool is_reflected(BigType t) {
  switch (t) {
    case BigType::O1: case BigType::O2: case BigType::O3: case BigType::O4:
    case BigType::O5: case BigType::O6: case BigType::O7: case BigType::LB:
      return true;
    default:
      return false;
  }
}

namespace {

constexpr PointData kGreenR{Color::Green, Arrow::Right};
constexpr PointData kGreenU{Color::Green, Arrow::Up};
constexpr PointData kBlackD{Color::Black, Arrow::Down};

struct Pt {
  std::int64_t x, y;
};

void put(std::vector<LayoutRect>& out, std::int64_t x, std::int64_t y, PointData d) {
  out.push_back({x, x, y, y, d});
}

// A green path through waypoints moving right or up.  Horizontal runs use
// rows Y-1, Y with arrow Right; vertical runs use columns X, X+1 with arrow
// Up and a black column X-1 pointing Down on their left.  Painted in three
// passes: black guide columns, path body, corner fix-ups.
void green_path(std::vector<LayoutRect>& out, const std::vector<Pt>& pts) {
  struct Seg {
    Pt a, b;
    bool vertical;
  };
  std::vector<Seg> segs;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) segs.push_back({pts[i], pts[i + 1], pts[i].x == pts[i + 1].x});
  for (auto& s : segs)
    if (s.vertical) out.push_back({s.a.x - 1, s.a.x - 1, s.a.y, s.b.y, kBlackD});
  for (auto& s : segs) {
    if (s.vertical) out.push_back({s.a.x, s.a.x + 1, s.a.y - 1, s.b.y, kGreenU});
    else out.push_back({s.a.x, s.b.x + 1, s.a.y - 1, s.a.y, kGreenR});
  }
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const Pt c = segs[i].b;
    if (!segs[i].vertical && segs[i + 1].vertical) {
      // right then up
      put(out, c.x, c.y - 1, kGreenR);
      put(out, c.x + 1, c.y - 1, kGreenU);
      put(out, c.x, c.y, kGreenU);
      put(out, c.x + 1, c.y, kGreenU);
      put(out, c.x - 1, c.y + 1, kBlackD);
    } else if (segs[i].vertical && !segs[i + 1].vertical) {
      // up then right
      put(out, c.x, c.y - 1, kGreenU);
      put(out, c.x + 1, c.y - 1, kGreenR);
      put(out, c.x, c.y, kGreenR);
      put(out, c.x + 1, c.y, kGreenR);
    }
  }
}

// Rerouting offset of the two paths in the crossing gadget.
constexpr std::int64_t kCrossOffset = 6;

void clip(std::vector<LayoutRect>& rs, std::int64_t side) {
  std::vector<LayoutRect> out;
  for (auto r : rs) {
    r.x0 = std::max<std::int64_t>(r.x0, 0);
    r.y0 = std::max<std::int64_t>(r.y0, 0);
    r.x1 = std::min(r.x1, side);
    r.y1 = std::min(r.y1, side);
    if (r.x0 <= r.x1 && r.y0 <= r.y1) out.push_back(r);
  }
  rs.swap(out);
}

}  // namespace

Template build_template(BaseTemplate t, std::int64_t s) {
  if (s < 32) throw Error(Errc::GuardExceeded, "big squares need side >= 32");
  const std::int64_t c = s / 2, F = -10, T = s + 10, k = kCrossOffset;
  Template tp;
  auto& r = tp.rects;
  switch (t) {
    case BaseTemplate::G1: green_path(r, {{F, c}, {T, c}}); break;
    case BaseTemplate::G2: green_path(r, {{c, F}, {c, T}}); break;
    case BaseTemplate::G3: green_path(r, {{F, c}, {c, c}, {c, T}}); break;
    case BaseTemplate::G4: green_path(r, {{c, F}, {c, c}, {T, c}}); break;
    case BaseTemplate::G5: green_path(r, {{c, c}, {T, c}}); break;
    case BaseTemplate::G6: green_path(r, {{c, F}, {c, c}}); break;
    case BaseTemplate::G7:
      green_path(r, {{F, c}, {c - k, c}, {c - k, c + k}, {c, c + k}, {c, T}});
      green_path(r, {{c, F}, {c, c - k}, {c + k, c - k}, {c + k, c}, {T, c}});
      break;
    case BaseTemplate::E1: break;
    case BaseTemplate::E2: r.push_back({0, 0, 0, s, kBlackD}); break;
    case BaseTemplate::S:
      r.push_back({0, 0, 0, s, kBlackD});
      green_path(r, {{0, 1}, {c, 1}, {c, c}, {T, c}});
      break;
    case BaseTemplate::LA:
      // green path arriving from below and stopping at the junction,
      // orange path leaving to the left (drawn as orange pointing right,
      // i.e. towards the junction)
      r.push_back({c, c + 1, 0, c + 1, kGreenU});
      r.push_back({c - 1, c - 1, 0, c - 1, kBlackD});
      r.push_back({0, c - 1, c, c + 1, PointData{Color::Orange, Arrow::Right}});
      break;
  }
  clip(r, s);
  return tp;
}

std::optional<PointData> medium_cell(int kind, int a, int b) {
  constexpr PointData kOraU{Color::Orange, Arrow::Up};
  constexpr PointData kBluU{Color::Blue, Arrow::Up};
  constexpr PointData kBluL{Color::Blue, Arrow::Left};
  // orange-blue path running up: orange column a=1, blue columns a=2,3
  auto column = [&](int b0, int b1) -> std::optional<PointData> {
    if (b < b0 || b > b1) return std::nullopt;
    if (a == 1) return kOraU;
    if (a >= 2) return kBluU;
    return std::nullopt;
  };
  // blue path running left in rows b=1..3
  auto row = [&](int a0, int a1) -> std::optional<PointData> {
    if (a < a0 || a > a1 || b < 1) return std::nullopt;
    return kBluL;
  };
  switch (kind) {
    case 1: return column(0, 3);  // traversal
    case 2: return column(0, 1);  // sink
    case 3: return row(0, 3);     // blue path
    case 4: {                     // turn into the diagonal square
      if ((a == 2 && b == 0) || (a == 3 && b <= 2) || (a == 2 && b == 1)) return kBluU;
      if ((a == 3 && b == 3) || (a == 2 && b >= 2)) return kBluL;
      if (a == 1 && b == 0) return kOraU;
      return row(0, 3);
    }
    case 5: {  // blue path merging into a traversing column
      if (a == 3 && b >= 1) return kBluL;
      return column(0, 3);
    }
    case 6: return row(0, 2);  // blue path restarting left of a column
    default: return std::nullopt;
  }
}

Rational regime_value(Color col, const Integer& x, const Integer& y, const Integer& N) {
  switch (col) {
    case Color::Red: return Rational(x - y + 4 * N + 20);
    case Color::Orange: return Rational(-x - y + 4 * N + 10);
    case Color::Black: return Rational(x + y);
    case Color::Green: return Rational(-x - y - 10);
    case Color::Blue: return Rational(x - y - 2 * N - 20);
  }
  return 0;
}

std::int64_t regime_value_i64(Color col, std::int64_t x, std::int64_t y, std::int64_t N) {
  switch (col) {
    case Color::Red: return x - y + 4 * N + 20;
    case Color::Orange: return -x - y + 4 * N + 10;
    case Color::Black: return x + y;
    case Color::Green: return -x - y - 10;
    case Color::Blue: return x - y - 2 * N - 20;
  }
  return 0;
}

std::pair<Rational, Rational> arrow_gradient(Arrow a) {
  const Rational h(1, 2);
  switch (a) {
    case Arrow::Left: return {h, 0};
    case Arrow::Right: return {-h, 0};
    case Arrow::Up: return {0, -h};
    case Arrow::Down: return {0, h};
  }
  return {0, 0};
}

Grid::Grid(const EolInstance& eol, const IterInstance& iter)
    : g_(GridSpec::make(eol.n, iter.m)), eol_(eol), iter_(iter) {
  eol_.validate();
  iter_.validate();
  if (eol.n > 20 || iter.m > 20) throw Error(Errc::GuardExceeded, "host tables need n, m <= 20");
  const std::uint64_t V = std::uint64_t{1} << eol.n, U = std::uint64_t{1} << iter.m;
  const EolInstance pe = preprocess_eol(eol);
  const IterInstance pi = preprocess_iter(iter);
  S_.resize(V);
  P_.resize(V);
  C_.resize(U);
  for (std::uint64_t v = 1; v <= V; ++v) {
    S_[v - 1] = pe.succ(v);
    P_[v - 1] = pe.pred(v);
  }
  for (std::uint64_t u = 1; u <= U; ++u) C_[u - 1] = pi.map(u);
  if (S_[0] == 1)
    throw Error(Errc::InvalidInstance, "vertex 1 loses its successor under preprocessing (1 is itself a solution)");
  for (int t = 0; t < kBaseTemplateCount; ++t)
    templates_[t] = build_template(static_cast<BaseTemplate>(t), g_.big_side);
}

std::int64_t Grid::big_index(std::int64_t coord) const {
  std::int64_t v = coord / g_.big_side;
  const std::int64_t last = (std::int64_t{1} << g_.n) - 1;
  return std::min(std::max<std::int64_t>(v, 0), last) + 1;
}

BigType Grid::big_square_type(std::int64_t v1, std::int64_t v2) const {
  const std::int64_t V = std::int64_t{1} << g_.n;
  if (v1 < 1 || v2 < 1 || v1 > V || v2 > V) throw Error(Errc::OutOfRange, "big square index");
  if (v1 == v2) {
    const std::int64_t v = v1;
    if (v == 1) return BigType::S;
    const std::int64_t p = static_cast<std::int64_t>(P(v)), q = static_cast<std::int64_t>(S(v));
    const bool has_p = p != v, has_q = q != v;
    if (has_p && has_q) {
      if (p < v && v < q) return BigType::G4;
      if (p > v && v > q) return BigType::O4;
      if (p < v && q < v) return BigType::LA;
      return BigType::LB;
    }
    if (has_q) return q > v ? BigType::G5 : BigType::O5;
    if (has_p) return p < v ? BigType::G6 : BigType::O6;
    return BigType::E1;
  }
  if (v1 == 1) return BigType::E2;
  // Below the diagonal: green edges a -> b with a < b run right along row a
  // and then up column b.  Above: orange edges run left then down.
  const std::int64_t a = v2;
  const std::int64_t sa = static_cast<std::int64_t>(S(a));
  const std::int64_t pb = static_cast<std::int64_t>(P(v1));
  if (v1 > v2) {
    const bool horiz = sa != a && sa > v1;
    const bool turn = sa == v1;
    const bool vert = pb != v1 && pb < v2;
    if (turn) return BigType::G3;
    if (horiz && vert) return BigType::G7;
    if (horiz) return BigType::G1;
    if (vert) return BigType::G2;
    return BigType::E1;
  }
  const bool horiz = sa != a && sa < v1;
  const bool turn = sa == v1;
  const bool vert = pb != v1 && pb > v2;
  if (turn) return BigType::O3;
  if (horiz && vert) return BigType::O7;
  if (horiz) return BigType::O1;
  if (vert) return BigType::O2;
  return BigType::E1;
}

MedType Grid::medium_square_type(LabCase lc, std::int64_t u1, std::int64_t u2) const {
  const std::int64_t M = std::int64_t{1} << g_.m;
  if (u1 < 1 || u2 < 1 || u1 > M || u2 > M) throw Error(Errc::OutOfRange, "medium square index");
  auto Ci = [&](std::int64_t u) { return static_cast<std::int64_t>(C(static_cast<std::uint64_t>(u))); };
  // column u carries an orange-blue path through row w (w below its top)
  auto traverses = [&](std::int64_t u, std::int64_t w) { return u >= 1 && Ci(u) > u && w < u; };
  int k;
  if (u1 == u2) {
    if (Ci(u1) > u1) k = Ci(Ci(u1)) > Ci(u1) ? 4 : 2;
    else k = 7;
  } else if (u1 < u2) {
    k = 7;
  } else {
    // blue path of row u2 spans columns u2+1 .. C(u2)
    const bool blue = Ci(u2) > u2 && Ci(Ci(u2)) > Ci(u2) && u1 <= Ci(u2);
    if (traverses(u1, u2)) k = (blue && !traverses(u1 - 1, u2)) ? 5 : 1;
    else if (blue) k = traverses(u1 - 1, u2) ? 6 : 3;
    else k = 7;
  }
  return static_cast<MedType>((lc == LabCase::A ? 0 : 7) + k - 1);
}

PointData Grid::point_data(std::int64_t x, std::int64_t y) const {
  if (x < 0 || y < 0 || x > g_.N || y > g_.N) throw Error(Errc::OutOfRange, "grid point");
  const std::int64_t s = g_.big_side;
  const std::int64_t v1 = big_index(x), v2 = big_index(y);
  std::int64_t i = x - (v1 - 1) * s, j = y - (v2 - 1) * s;
  const BigType t = big_square_type(v1, v2);
  const bool refl = is_reflected(t);
  if (refl) {
    i = s - i;
    j = s - j;
  }
  auto finish = [&](PointData d) {
    if (refl) d.color = swap_color(d.color);
    return d;
  };
  if (t == BigType::LA || t == BigType::LB) {
    const std::int64_t M = std::int64_t{1} << g_.m;
    const std::int64_t dx = g_.lab_x0() - i, dy = j - g_.lab_y0();
    if (dx >= 1 && dx <= 4 * M && dy >= 0 && dy < 4 * M) {
      const std::int64_t u1 = (dx + 3) / 4, u2 = dy / 4 + 1;
      const int a = static_cast<int>(4 * u1 - dx), b = static_cast<int>(dy % 4);
      const int kind = static_cast<int>(medium_square_type(LabCase::A, u1, u2)) + 1;
      if (auto d = medium_cell(kind, a, b)) return finish(*d);
    }
  }
  const auto& rects = templates_[static_cast<int>(base_template(t))].rects;
  for (auto it = rects.rbegin(); it != rects.rend(); ++it)
    if (i >= it->x0 && i <= it->x1 && j >= it->y0 && j <= it->y1) return finish(it->data);
  return finish(PointData{});
}

}  // namespace cls
