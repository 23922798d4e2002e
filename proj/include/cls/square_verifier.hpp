#pragma once

#include "cls/kkt_compiler.hpp"
#include "cls/layout.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cls {

enum class Side : std::uint8_t { Left, Right, Bottom, Top };
const char* side_name(Side s);

// Corner order: (0,0), (0,1), (1,0), (1,1) as (x offset, y offset).
struct Archetype {
  std::array<PointData, 4> corners;
  std::optional<Side> boundary;

  std::string canonical_key() const;
  static Archetype parse_key(const std::string& key);
  bool operator<(const Archetype& o) const { return canonical_key() < o.canonical_key(); }
  bool operator==(const Archetype& o) const = default;
};

struct ArchetypeTags {
  std::uint64_t nonsolution = 0;  // occurrences outside solution regions
  std::uint64_t solution = 0;
  std::int64_t x = 0, y = 0;      // first occurrence (lower-left grid point)
  std::set<std::string> origins;  // big-square types, and medium types inside labyrinths
  // sat expected iff the archetype occurs only inside solution regions
  bool expect_sat() const { return nonsolution == 0; }
};

struct Enumeration {
  std::map<Archetype, ArchetypeTags> archetypes;
  std::set<std::string> origins_seen;
  std::size_t interior() const;
  std::size_t boundary() const;
};

// Scans every small square of the grid, tagging each archetype with the
// gadgets it came from and whether the square decodes to a solution.
Enumeration enumerate_archetypes(const Grid& g);
// Merges b into a.
void merge_enumeration(Enumeration& a, const Enumeration& b);
// Every big-square and medium-square type name.
std::vector<std::string> all_origin_names();

// a linear form c . (red, orange, black, green, blue) + k
struct ColorForm {
  std::array<Rational, 5> c{};
  Rational k = 0;
  ColorForm& operator+=(const ColorForm& o);
  ColorForm operator*(const Rational& s) const;
  Rational at(const std::array<Rational, 5>& colors) const;
  bool color_free() const;
};

struct SymbolicPatch {
  std::array<std::array<ColorForm, 4>, 4> f;   // f[i][j] multiplies x^i y^j
  std::array<std::array<ColorForm, 4>, 4> fx;  // degree <= 2 in x
  std::array<std::array<ColorForm, 4>, 4> fy;  // degree <= 2 in y
  std::array<ColorForm, 4> corner_values;
};

SymbolicPatch symbolic_patch(const Archetype& a);
// The colour symbol of each present colour is its regime value at the
// corner minimising that regime over the square with lower-left (x, y).
std::array<Rational, 5> concrete_colors(const Archetype& a, std::int64_t x, std::int64_t y, std::int64_t N);
std::pair<Rational, Rational> eval_symbolic_grad(const SymbolicPatch& p, const std::array<Rational, 5>& colors,
                                                 const Rational& x, const Rational& y);

struct SmtOptions {
  Rational eps{1, 100};
  Rational gap{4};  // consecutive colours differ by more than this
};

std::string smtlib_script(const Archetype& a, const SmtOptions& opt);
void emit_smtlib(const Archetype& a, const SmtOptions& opt, const std::string& path);

struct Counterexample {
  Rational x, y;
  std::array<Rational, 5> colors;
  Rational fx, fy;
};

struct FalsifyOptions {
  Rational eps{1, 100};
  Rational gap{4};
  int density = 64;
  int color_trials = 32;
  // grid points per trial refined by Newton on the gradient; 0 samples only
  int newton_seeds = 8;
  std::uint64_t seed = 1;
};

std::optional<Counterexample> falsify_sample(const Archetype& a, const FalsifyOptions& opt);
// Grid sampling plus Newton refinement at fixed colour values.
std::optional<Counterexample> find_near_stationary(const Archetype& a, const std::array<Rational, 5>& colors,
                                                   const Rational& eps, int density = 64, int newton_seeds = 8);

struct FalsifyRow {
  Archetype archetype;
  bool expect_sat = false;
  std::optional<Counterexample> cex;
};

// One row per archetype, in enumeration order.  The seed of archetype k is
// opt.seed + k, so both kernels give identical rows.
std::vector<FalsifyRow> falsify_all_serial(const Enumeration& e, const FalsifyOptions& opt);
std::vector<FalsifyRow> falsify_all_parallel(const Enumeration& e, const FalsifyOptions& opt);

// True if the corner point with the given arrow is an eps-KKT point of the
// box, with lo_x / lo_y telling which side of each coordinate it sits on.
bool corner_is_kkt(Arrow a, bool lo_x, bool lo_y, const Rational& eps);
// True iff none of the four domain corners is an eps-KKT point.
bool corner_check(const Grid& g, const Rational& eps);

// Integer form of decode_solution at the centre of the small square (x, y).
bool in_solution_region(const Grid& g, std::int64_t x, std::int64_t y);

enum class SmtVerdict { Sat, Unsat, Unknown, Missing };
const char* smt_verdict_name(SmtVerdict v);
SmtVerdict parse_smt_output(const std::string& text);
// Reads <dir>/<key>.result for each key.
std::map<std::string, SmtVerdict> read_smt_results(const std::string& dir, const std::vector<std::string>& keys);
// Runs `<solver> -T:<timeout_s> <path>` and parses its first line.  Missing
// when the solver cannot be started.
SmtVerdict run_smt_solver(const std::string& solver, const std::string& path, int timeout_s);
bool smt_solver_available(const std::string& solver);

// Writes one .smt2 per archetype plus manifest.json.
void export_smt(const Enumeration& e, const SmtOptions& opt, const std::string& dir);

}  // namespace cls
