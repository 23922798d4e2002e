#include "cls/io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace cls {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot write " + path);
  f << text;
  if (!f) throw Error(Errc::IoError, "write failed: " + path);
}

namespace {

std::vector<std::pair<std::uint64_t, std::uint64_t>> parse_pairs(const std::string& text, const std::string& sep) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto p = line.find(sep);
    if (p == std::string::npos)
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": expected 'u " + sep + " v'");
    auto num = [&](const std::string& s) {
      std::istringstream ss(s);
      long long v;
      std::string rest;
      if (!(ss >> v) || (ss >> rest) || v < 1)
        throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": bad vertex '" + s + "'");
      return static_cast<std::uint64_t>(v);
    };
    out.emplace_back(num(line.substr(0, p)), num(line.substr(p + sep.size())));
  }
  return out;
}

json rat_vec(const Vec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

Vec vec_of(const json& a) {
  Vec v;
  for (const auto& x : a) v.push_back(parse_rational(x.get<std::string>()));
  return v;
}

Rational rat_of(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(Errc::ParseError, std::string("meta.json lacks '") + key + "'");
  return parse_rational(j.at(key).get<std::string>());
}

json domain_json(const Domain& d) {
  json j;
  j["lo"] = rat_vec(d.box.lo);
  j["hi"] = rat_vec(d.box.hi);
  if (d.poly) {
    json A = json::array();
    for (const auto& row : d.poly->A) A.push_back(rat_vec(row));
    j["A"] = A;
    j["b"] = rat_vec(d.poly->b);
  }
  return j;
}

Domain domain_of(const json& j) {
  Domain d;
  d.box.lo = vec_of(j.at("lo"));
  d.box.hi = vec_of(j.at("hi"));
  if (d.box.lo.size() != d.box.hi.size()) throw Error(Errc::DimensionMismatch, "domain lo/hi");
  if (j.contains("A")) {
    Polytope p;
    for (const auto& row : j.at("A")) p.A.push_back(vec_of(row));
    p.b = vec_of(j.at("b"));
    d.poly = p;
  }
  return d;
}

void write_meta(const std::string& dir, const json& j) { write_file(dir + "/meta.json", j.dump(2) + "\n"); }

json read_meta(const std::string& dir, const std::string& kind) {
  json j;
  try {
    j = json::parse(read_file(dir + "/meta.json"));
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, dir + "/meta.json: " + e.what());
  }
  if (!kind.empty() && j.value("kind", "") != kind)
    throw Error(Errc::ParseError, dir + " is a '" + j.value("kind", "?") + "' bundle, expected '" + kind + "'");
  return j;
}

ArithCircuit load_ac(const std::string& path) { return parse_arith(read_file(path)); }
BoolCircuit load_bc(const std::string& path) { return parse_bool(read_file(path)); }

const char* mode_name(GdMode m) { return m == GdMode::LocalSearch ? "local_search" : "fixpoint"; }

}  // namespace

std::vector<std::pair<std::uint64_t, std::uint64_t>> parse_edge_list(const std::string& text) {
  return parse_pairs(text, "->");
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> parse_iter_list(const std::string& text) {
  return parse_pairs(text, ":");
}

int bits_for(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& entries) {
  std::uint64_t mx = 1;
  for (auto [u, v] : entries) mx = std::max({mx, u, v});
  int k = 1;
  while ((std::uint64_t{1} << k) < mx) ++k;
  return k;
}

std::string bundle_kind(const std::string& dir) { return read_meta(dir, "").value("kind", ""); }

void save_eol(const std::string& dir, const EolInstance& e) {
  json j;
  j["kind"] = "eol";
  j["n"] = e.n;
  write_meta(dir, j);
  write_file(dir + "/S.bc", serialize(e.S));
  write_file(dir + "/P.bc", serialize(e.P));
}

EolInstance load_eol(const std::string& dir) {
  const json j = read_meta(dir, "eol");
  EolInstance e;
  e.n = j.at("n").get<int>();
  e.S = load_bc(dir + "/S.bc");
  e.P = load_bc(dir + "/P.bc");
  e.validate();
  return e;
}

void save_iter(const std::string& dir, const IterInstance& i) {
  json j;
  j["kind"] = "iter";
  j["m"] = i.m;
  write_meta(dir, j);
  write_file(dir + "/C.bc", serialize(i.C));
}

IterInstance load_iter(const std::string& dir) {
  const json j = read_meta(dir, "iter");
  IterInstance i;
  i.m = j.at("m").get<int>();
  i.C = load_bc(dir + "/C.bc");
  i.validate();
  return i;
}

void save_layout(const std::string& dir, const LayoutInfo& l) {
  const Grid g(l.eol, l.iter);
  const GridSpec& s = g.spec();
  json j;
  j["n"] = s.n;
  j["m"] = s.m;
  j["N"] = s.N;
  j["unit"] = l.unit;
  const std::int64_t V = std::int64_t{1} << s.n;
  json rows = json::array();
  for (std::int64_t v2 = V; v2 >= 1; --v2) {
    std::string row;
    for (std::int64_t v1 = 1; v1 <= V; ++v1) {
      if (v1 > 1) row += ' ';
      row += big_type_name(g.big_square_type(v1, v2));
    }
    rows.push_back(row);
  }
  j["big_square_types_top_row_first"] = rows;
  write_file(dir + "/layout-meta.json", j.dump(2) + "\n");
  write_file(dir + "/S.bc", serialize(l.eol.S));
  write_file(dir + "/P.bc", serialize(l.eol.P));
  write_file(dir + "/C.bc", serialize(l.iter.C));
}

std::optional<LayoutInfo> load_layout(const std::string& dir) {
  if (!fs::exists(dir + "/layout-meta.json")) return std::nullopt;
  json j;
  try {
    j = json::parse(read_file(dir + "/layout-meta.json"));
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, dir + "/layout-meta.json: " + e.what());
  }
  LayoutInfo l;
  l.eol.n = j.at("n").get<int>();
  l.eol.S = load_bc(dir + "/S.bc");
  l.eol.P = load_bc(dir + "/P.bc");
  l.iter.m = j.at("m").get<int>();
  l.iter.C = load_bc(dir + "/C.bc");
  l.unit = j.at("unit").get<bool>();
  l.eol.validate();
  l.iter.validate();
  return l;
}

std::shared_ptr<const Oracle> layout_oracle(const LayoutInfo& l) {
  auto grid = std::make_shared<Grid>(l.eol, l.iter);
  const Rational N(static_cast<long>(grid->spec().N));
  auto o = std::make_shared<Oracle>();
  if (l.unit) {
    o->f = [grid, N](const Vec& x) -> Rational { return eval_direct(*grid, N * x).f / N; };
    o->grad = [grid, N](const Vec& x) { return eval_direct(*grid, N * x).grad; };
  } else {
    o->f = [grid](const Vec& x) { return eval_direct(*grid, x).f; };
    o->grad = [grid](const Vec& x) { return eval_direct(*grid, x).grad; };
  }
  return o;
}

void save_kkt(const std::string& dir, const KktInstance& k) {
  json j;
  j["kind"] = "kkt";
  j["n"] = k.domain.dim();
  j["eps"] = to_string(k.eps);
  j["L"] = to_string(k.L);
  j["domain"] = domain_json(k.domain);
  write_meta(dir, j);
  write_file(dir + "/f.ac", serialize(k.f));
  write_file(dir + "/grad.ac", serialize(k.grad_f));
}

KktInstance load_kkt(const std::string& dir) {
  const json j = read_meta(dir, "kkt");
  KktInstance k;
  k.eps = rat_of(j, "eps");
  k.L = rat_of(j, "L");
  k.domain = domain_of(j.at("domain"));
  k.f = load_ac(dir + "/f.ac");
  k.grad_f = load_ac(dir + "/grad.ac");
  if (auto l = load_layout(dir)) k.oracle = layout_oracle(*l);
  return k;
}

void save_gd(const std::string& dir, const GdInstance& g) {
  json j;
  j["kind"] = "gd";
  j["mode"] = mode_name(g.mode);
  j["n"] = g.domain.dim();
  j["eps"] = to_string(g.eps);
  j["eta"] = to_string(g.eta);
  j["L"] = to_string(g.L);
  j["domain"] = domain_json(g.domain);
  write_meta(dir, j);
  write_file(dir + "/f.ac", serialize(g.f));
  write_file(dir + "/grad.ac", serialize(g.grad_f));
}

GdInstance load_gd(const std::string& dir) {
  const json j = read_meta(dir, "gd");
  GdInstance g;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "local_search") g.mode = GdMode::LocalSearch;
  else if (mode == "fixpoint") g.mode = GdMode::Fixpoint;
  else throw Error(Errc::ParseError, "gd bundle mode '" + mode + "' (fd bundles load with load_gdfd)");
  g.eps = rat_of(j, "eps");
  g.eta = rat_of(j, "eta");
  g.L = rat_of(j, "L");
  g.domain = domain_of(j.at("domain"));
  g.f = load_ac(dir + "/f.ac");
  g.grad_f = load_ac(dir + "/grad.ac");
  if (auto l = load_layout(dir)) g.oracle = layout_oracle(*l);
  return g;
}

void save_gclo(const std::string& dir, const GcloInstance& g) {
  json j;
  j["kind"] = "gclo";
  j["n"] = g.domain.dim();
  j["eps"] = to_string(g.eps);
  j["L"] = to_string(g.L);
  j["domain"] = domain_json(g.domain);
  write_meta(dir, j);
  write_file(dir + "/p.ac", serialize(g.p));
  write_file(dir + "/g.ac", serialize(g.g));
}

GcloInstance load_gclo(const std::string& dir) {
  const json j = read_meta(dir, "gclo");
  GcloInstance g;
  g.eps = rat_of(j, "eps");
  g.L = rat_of(j, "L");
  g.domain = domain_of(j.at("domain"));
  g.p = load_ac(dir + "/p.ac");
  g.g = load_ac(dir + "/g.ac");
  return g;
}

void save_brouwer(const std::string& dir, const BrouwerInstance& b) {
  json j;
  j["kind"] = "brouwer";
  j["n"] = b.domain.dim();
  j["eps"] = to_string(b.eps);
  j["L"] = to_string(b.L);
  j["domain"] = domain_json(b.domain);
  write_meta(dir, j);
  write_file(dir + "/g.ac", serialize(b.g));
}

BrouwerInstance load_brouwer(const std::string& dir) {
  const json j = read_meta(dir, "brouwer");
  BrouwerInstance b;
  b.eps = rat_of(j, "eps");
  b.L = rat_of(j, "L");
  b.domain = domain_of(j.at("domain"));
  b.g = load_ac(dir + "/g.ac");
  return b;
}

void save_gdfd(const std::string& dir, const GdFdInstance& g) {
  json j;
  j["kind"] = "gd";
  j["mode"] = "fd";
  j["n"] = g.domain.dim();
  j["eps"] = to_string(g.eps);
  j["eta"] = to_string(g.eta);
  j["h"] = to_string(g.h);
  j["domain"] = domain_json(g.domain);
  json a;
  a["delta"] = to_string(g.approx.eps);
  a["L"] = to_string(g.approx.L);
  a["M"] = to_string(g.approx.M);
  a["k"] = g.approx.params.k;
  a["m"] = g.approx.m;
  a["lo"] = rat_vec(g.approx.domain.lo);
  a["hi"] = rat_vec(g.approx.domain.hi);
  j["approx"] = a;
  write_meta(dir, j);
  save_linear(dir + "/f.lc", g.approx.F);
}

GdFdInstance load_gdfd(const std::string& dir) {
  const json j = read_meta(dir, "gd");
  if (j.value("mode", "") != "fd") throw Error(Errc::ParseError, dir + " is not a finite-difference bundle");
  GdFdInstance g;
  g.eps = rat_of(j, "eps");
  g.eta = rat_of(j, "eta");
  g.h = rat_of(j, "h");
  g.domain = domain_of(j.at("domain"));
  const json& a = j.at("approx");
  g.approx.eps = rat_of(a, "delta");
  g.approx.L = rat_of(a, "L");
  g.approx.M = rat_of(a, "M");
  g.approx.m = a.at("m").get<int>();
  g.approx.params = SampleParams::with_k(static_cast<int>(g.domain.dim()), a.at("k").get<int>());
  g.approx.domain.lo = vec_of(a.at("lo"));
  g.approx.domain.hi = vec_of(a.at("hi"));
  g.approx.F = load_linear(dir + "/f.lc");
  return g;
}

void save_linear(const std::string& path, const LinearCircuit& c) { write_file(path, serialize(c.circuit())); }

LinearCircuit load_linear(const std::string& path) { return LinearCircuit(load_ac(path)); }

}  // namespace cls
