#pragma once

#include "cls/kkt_compiler.hpp"
#include "cls/linear_approx.hpp"
#include "cls/reductions.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cls {

// Instance bundles are directories holding meta.json plus circuit files.
// See docs/bundles.md for the schema.

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// "u -> v" lines; '#' starts a comment.  Returns the edges and the largest
// vertex seen.
std::vector<std::pair<std::uint64_t, std::uint64_t>> parse_edge_list(const std::string& text);
// "u : C(u)" lines.
std::vector<std::pair<std::uint64_t, std::uint64_t>> parse_iter_list(const std::string& text);
// smallest k >= 1 with 2^k >= every vertex
int bits_for(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& entries);

std::string bundle_kind(const std::string& dir);

void save_eol(const std::string& dir, const EolInstance& e);
EolInstance load_eol(const std::string& dir);
void save_iter(const std::string& dir, const IterInstance& i);
IterInstance load_iter(const std::string& dir);

// Grid information stored next to compiled instances so that decoding and
// the fast evaluator work from the bundle alone.  `unit` marks the rescaled
// [0,1]^2 form.
struct LayoutInfo {
  EolInstance eol;
  IterInstance iter;
  bool unit = false;
};

void save_layout(const std::string& dir, const LayoutInfo& l);
std::optional<LayoutInfo> load_layout(const std::string& dir);
// Oracle for the compiled function (scaled to the unit square if l.unit).
std::shared_ptr<const Oracle> layout_oracle(const LayoutInfo& l);

void save_kkt(const std::string& dir, const KktInstance& k);
// Attaches the layout oracle when the bundle carries layout-meta.json.
KktInstance load_kkt(const std::string& dir);
void save_gd(const std::string& dir, const GdInstance& g);
GdInstance load_gd(const std::string& dir);
void save_gclo(const std::string& dir, const GcloInstance& g);
GcloInstance load_gclo(const std::string& dir);
void save_brouwer(const std::string& dir, const BrouwerInstance& b);
BrouwerInstance load_brouwer(const std::string& dir);
void save_gdfd(const std::string& dir, const GdFdInstance& g);
GdFdInstance load_gdfd(const std::string& dir);

void save_linear(const std::string& path, const LinearCircuit& c);
LinearCircuit load_linear(const std::string& path);

}  // namespace cls
