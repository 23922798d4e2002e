#pragma once

#include "cls/core.hpp"
#include "cls/tfnp.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cls {

// Declaration order is the value order, highest first.
enum class Color : std::uint8_t { Red, Orange, Black, Green, Blue };
enum class Arrow : std::uint8_t { Left, Right, Up, Down };

const char* color_name(Color c);
const char* arrow_name(Arrow a);
Color swap_color(Color c);  // green <-> orange, blue <-> red

struct PointData {
  Color color = Color::Black;
  Arrow arrow = Arrow::Left;
  bool operator==(const PointData&) const = default;
};

enum class BigType : std::uint8_t {
  G1, G2, G3, G4, G5, G6, G7,
  O1, O2, O3, O4, O5, O6, O7,
  E1, E2, S, LA, LB,
};
constexpr int kBigTypeCount = 19;
const char* big_type_name(BigType t);

// LA1..LA7 then LB1..LB7
enum class MedType : std::uint8_t {
  LA1, LA2, LA3, LA4, LA5, LA6, LA7,
  LB1, LB2, LB3, LB4, LB5, LB6, LB7,
};
const char* med_type_name(MedType t);

enum class LabCase { A, B };

struct GridSpec {
  int n = 0, m = 0;
  std::int64_t N = 0;         // 2^(n+m+4)
  std::int64_t big_side = 0;  // 2^(m+4)
  std::int64_t lab_side = 0;  // 2^(m+2)
  static GridSpec make(int n, int m);
  std::int64_t centre() const { return big_side / 2; }
  // Labyrinth anchor in LA-frame local coordinates: medium square M(u1,u2)
  // covers x in [lab_x0 - 4u1, lab_x0 - 4u1 + 3], y in [lab_y0 + 4(u2-1), +3].
  std::int64_t lab_x0() const { return centre() + 2; }
  std::int64_t lab_y0() const { return centre() + 2; }
};

// Axis-aligned block of grid points in big-square local coordinates.
struct LayoutRect {
  std::int64_t x0, x1, y0, y1;
  PointData data;
};

// A gadget template: later rectangles override earlier ones.  O-types and
// LB use the template of their green / case-A twin under the point
// reflection about the square centre with colours swapped.
struct Template {
  std::vector<LayoutRect> rects;
};

enum class BaseTemplate : std::uint8_t { G1, G2, G3, G4, G5, G6, G7, E1, E2, S, LA };
constexpr int kBaseTemplateCount = 11;

BaseTemplate base_template(BigType t);
bool is_reflected(BigType t);
Template build_template(BaseTemplate t, std::int64_t side);

// Medium square content in local (a,b) in [0,3]^2 for LA1..LA7.
// Returns nullopt where the environment shows through.
std::optional<PointData> medium_cell(int la_kind, int a, int b);

// Host model of the grid.  Holds the preprocessed S', P', C' as tables.
class Grid {
 public:
  Grid(const EolInstance& eol, const IterInstance& iter);

  const GridSpec& spec() const { return g_; }
  const EolInstance& eol() const { return eol_; }
  const IterInstance& iter() const { return iter_; }

  std::uint64_t S(std::uint64_t v) const { return S_[v - 1]; }
  std::uint64_t P(std::uint64_t v) const { return P_[v - 1]; }
  std::uint64_t C(std::uint64_t u) const { return u == 0 ? 0 : C_[u - 1]; }

  BigType big_square_type(std::int64_t v1, std::int64_t v2) const;
  MedType medium_square_type(LabCase c, std::int64_t u1, std::int64_t u2) const;
  PointData point_data(std::int64_t x, std::int64_t y) const;

  // big square containing grid point / small square (floor with clamp)
  std::int64_t big_index(std::int64_t coord) const;

  const Template& base(BaseTemplate t) const { return templates_[static_cast<int>(t)]; }

 private:
  GridSpec g_;
  EolInstance eol_;
  IterInstance iter_;
  std::vector<std::uint64_t> S_, P_, C_;
  std::array<Template, kBaseTemplateCount> templates_;
};

Rational regime_value(Color c, const Integer& x, const Integer& y, const Integer& N);
std::int64_t regime_value_i64(Color c, std::int64_t x, std::int64_t y, std::int64_t N);

// (f_x, f_y) prescribed at a grid point: -1/2 times the arrow direction
std::pair<Rational, Rational> arrow_gradient(Arrow a);

}  // namespace cls
