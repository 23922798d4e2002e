#include "cls/instances.hpp"
#include "cls/io.hpp"
#include "cls/kkt_compiler.hpp"
#include "cls/linear_approx.hpp"
#include "cls/reductions.hpp"
#include "cls/selftest.hpp"
#include "cls/solvers.hpp"
#include "cls/square_verifier.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <random>

using namespace cls;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kUsage = 1, kBudget = 2, kCounterexample = 3;

void print_verdict(const Verdict& v) {
  std::cout << "verdict " << verdict_name(v.kind) << "\n";
  for (const auto& w : v.witness) std::cout << "  witness " << to_string(w) << "\n";
}

void copy_layout(const std::string& from, const std::string& to) {
  if (auto l = load_layout(from)) save_layout(to, *l);
}

// Accepts rationals as in bundle files, plus terminating decimals such as 100.25.
Rational parse_number(std::string s) {
  const auto dot = s.find('.');
  if (dot == std::string::npos) return parse_rational(s);
  const std::string frac = s.substr(dot + 1);
  if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos)
    throw Error(Errc::ParseError, "bad number '" + s + "'");
  Integer den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  return normalize(Integer(s.erase(dot, 1)), den);
}

Vec parse_point(const std::string& s) {
  Vec v;
  std::size_t i = 0;
  while (i <= s.size()) {
    const auto j = std::min(s.find(',', i), s.size());
    v.push_back(parse_number(s.substr(i, j - i)));
    i = j + 1;
  }
  return v;
}

Vec random_point(const Box& b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const long den = 1L << 20;
  std::uniform_int_distribution<long> d(0, den);
  Vec x;
  for (std::size_t i = 0; i < b.dim(); ++i)
    x.push_back(b.lo[i] + (b.hi[i] - b.lo[i]) * normalize(Integer(d(rng)), Integer(den)));
  return x;
}

void report_decode(const std::string& dir, const Vec& x) {
  if (auto l = load_layout(dir)) {
    const Grid g(l->eol, l->iter);
    std::cout << "decode " << decode_solution(g, x, l->unit).describe() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-descent / continuous-local-search toolkit"};
  app.require_subcommand(1);
  int rc = kOk;

  // gen
  auto* gen = app.add_subcommand("gen", "Write an EOL or Iter instance bundle from a text list");
  gen->require_subcommand(1);
  std::string edges_path, map_path, out;
  int nbits = 0;
  auto* gen_eol = gen->add_subcommand("eol", "Lines 'u -> v', 1-based; unlisted vertices are isolated");
  gen_eol->add_option("--edges", edges_path, "edge list")->required();
  gen_eol->add_option("--n", nbits, "bits per vertex (default: smallest that fits)");
  gen_eol->add_option("-o,--out", out, "output bundle directory")->required();
  gen_eol->callback([&] {
    const auto e = parse_edge_list(read_file(edges_path));
    const int n = nbits ? nbits : bits_for(e);
    const EolInstance inst = eol_from_edges(n, e);
    save_eol(out, inst);
    std::cout << "n " << n << "\n";
    if (n <= 20) {
      std::cout << "solutions";
      for (auto v : all_eol_solutions(inst)) std::cout << " " << v;
      std::cout << "\n";
    }
  });
  auto* gen_iter = gen->add_subcommand("iter", "Lines 'u : C(u)', 1-based; unlisted nodes are fixed");
  gen_iter->add_option("--map", map_path, "map list")->required();
  gen_iter->add_option("--m", nbits, "bits per node (default: smallest that fits)");
  gen_iter->add_option("-o,--out", out, "output bundle directory")->required();
  gen_iter->callback([&] {
    const auto e = parse_iter_list(read_file(map_path));
    const int m = nbits ? nbits : bits_for(e);
    const IterInstance inst = iter_from_map(m, e);
    save_iter(out, inst);
    std::cout << "m " << m << "\n";
    if (m <= 20) {
      std::cout << "solutions";
      for (auto v : all_iter_solutions(inst)) std::cout << " " << v;
      std::cout << "\n";
    }
  });

  // build-kkt
  auto* build = app.add_subcommand("build-kkt", "Compile an EOL + Iter pair into a KKT instance bundle");
  std::string eol_dir, iter_dir;
  bool rescale_flag = false;
  build->add_option("--eol", eol_dir)->required();
  build->add_option("--iter", iter_dir)->required();
  build->add_option("-o,--out", out)->required();
  build->add_flag("--rescale", rescale_flag, "rescale to [0,1]^2");
  build->callback([&] {
    LayoutInfo l{load_eol(eol_dir), load_iter(iter_dir), rescale_flag};
    const Grid g(l.eol, l.iter);
    KktInstance k = emit_instance(g);
    if (rescale_flag) k = rescale(k, Rational(static_cast<long>(g.spec().N)));
    save_kkt(out, k);
    save_layout(out, l);
    std::cout << "N " << g.spec().N << "\neps " << to_string(k.eps) << "\nL " << to_string(k.L) << "\nsize(f) "
              << circuit_size(k.f) << "\nsize(grad) " << circuit_size(k.grad_f) << "\n";
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate an instance's circuits at a point");
  std::string inst_dir, point_s, circuit_path;
  bool allow_ill = false, use_oracle = false;
  eval->add_option("--instance", inst_dir);
  eval->add_option("--circuit", circuit_path, "a single .ac/.lc file instead of a bundle");
  eval->add_option("--point", point_s, "comma-separated rationals")->required();
  eval->add_flag("--allow-ill-behaved", allow_ill);
  eval->add_flag("--oracle", use_oracle, "use the layout evaluator when the bundle has one");
  eval->callback([&] {
    const Vec x = parse_point(point_s);
    auto run = [&](const char* name, const ArithCircuit& c) {
      if (!allow_ill && !is_well_behaved(c))
        throw Error(Errc::IllBehavedInput, std::string(name) + " is not well-behaved (pass --allow-ill-behaved)");
      std::cout << name << " " << to_string(eval_arith(c, x)) << "\n";
    };
    if (!circuit_path.empty()) return run("out", parse_arith(read_file(circuit_path)));
    if (inst_dir.empty()) throw CLI::ValidationError("eval needs --instance or --circuit");
    const std::string kind = bundle_kind(inst_dir);
    if (kind == "kkt") {
      const KktInstance k = load_kkt(inst_dir);
      if (use_oracle && k.oracle) {
        std::cout << "f " << to_string(k.eval_f(x)) << "\ngrad " << to_string(k.eval_grad(x)) << "\n";
      } else {
        run("f", k.f);
        run("grad", k.grad_f);
      }
    } else if (kind == "gd") {
      if (read_file(inst_dir + "/meta.json").find("\"fd\"") != std::string::npos) {
        std::cout << "F " << to_string(load_gdfd(inst_dir).eval_F(x)) << "\n";
      } else {
        const GdInstance g = load_gd(inst_dir);
        run("f", g.f);
        run("grad", g.grad_f);
      }
    } else if (kind == "gclo") {
      const GcloInstance g = load_gclo(inst_dir);
      run("p", g.p);
      run("g", g.g);
    } else if (kind == "brouwer") {
      run("g", load_brouwer(inst_dir).g);
    } else {
      throw Error(Errc::ParseError, "eval does not handle '" + kind + "' bundles");
    }
  });

  // gd
  auto* gd = app.add_subcommand("gd", "Run projected gradient descent");
  std::string start_s;
  std::uint64_t seed = 0, max_iters = 1000;
  std::string round_denom;
  auto* start_opt = gd->add_option("--start", start_s, "start point (default: lower corner)");
  gd->add_option("--random", seed, "seeded random start")->excludes(start_opt);
  gd->add_option("--instance", inst_dir)->required();
  gd->add_option("--max-iters", max_iters);
  gd->add_option("--round-denom", round_denom, "round iterates to this denominator");
  gd->callback([&] {
    const std::string kind = bundle_kind(inst_dir);
    GdInstance g;
    if (kind == "kkt") g = fixpoint_view(load_kkt(inst_dir));
    else if (kind == "gd") g = load_gd(inst_dir);
    else throw Error(Errc::ParseError, "gd needs a kkt or gd bundle");
    Vec x0 = g.domain.box.lo;
    if (!start_s.empty()) x0 = parse_point(start_s);
    if (gd->count("--random")) {
      x0 = random_point(g.domain.box, seed);
      std::cout << "seed " << seed << "\n";
    }
    std::cout << "start " << to_string(x0) << "\n";
    GdOptions o;
    o.max_iters = max_iters;
    o.keep_tail = 5;
    if (!round_denom.empty()) o.round_denom = Integer(round_denom);
    const GdResult r = projected_gd(g, x0, o);
    for (const auto& t : r.tail) std::cout << "  x " << to_string(t) << "\n";
    std::cout << "status " << (r.status == GdStatus::Stopped ? "Stopped" : "Budget") << "\niters " << r.iters
              << "\nmax_bits " << r.max_bits << "\nx " << to_string(r.x) << "\n";
    if (r.status == GdStatus::Stopped) {
      print_verdict(r.verdict);
      report_decode(inst_dir, r.x);
    } else {
      rc = kBudget;
    }
  });

  // check
  auto* chk = app.add_subcommand("check", "Check a candidate solution");
  std::uint64_t vertex = 0;
  chk->add_option("--instance", inst_dir)->required();
  chk->add_option("--point", point_s);
  chk->add_option("--vertex", vertex, "vertex / node for eol and iter bundles");
  chk->callback([&] {
    const std::string kind = bundle_kind(inst_dir);
    bool ok;
    if (kind == "eol" || kind == "iter") {
      ok = kind == "eol" ? check_eol(load_eol(inst_dir), vertex) : check_iter(load_iter(inst_dir), vertex);
      std::cout << (ok ? "solution" : "not a solution") << "\n";
    } else {
      const Vec x = parse_point(point_s);
      Verdict v;
      if (kind == "kkt") v = check_kkt(load_kkt(inst_dir), x);
      else if (kind == "gclo") v = check_gclo(load_gclo(inst_dir), x);
      else if (kind == "brouwer") v.kind = is_brouwer_solution(load_brouwer(inst_dir), x) ? VerdictKind::Solution
                                                                                           : VerdictKind::NotASolution;
      else if (read_file(inst_dir + "/meta.json").find("\"fd\"") != std::string::npos)
        v.kind = check_gd_fd(load_gdfd(inst_dir), x) ? VerdictKind::Solution : VerdictKind::NotASolution;
      else v = check_gd(load_gd(inst_dir), x);
      print_verdict(v);
      ok = v.kind != VerdictKind::NotASolution;
    }
    if (!ok) rc = kCounterexample;
  });

  // decode
  auto* dec = app.add_subcommand("decode", "Map a point of a compiled instance back to EOL / Iter");
  dec->add_option("--instance", inst_dir)->required();
  dec->add_option("--point", point_s)->required();
  dec->callback([&] {
    auto l = load_layout(inst_dir);
    if (!l) throw Error(Errc::ParseError, inst_dir + " has no layout-meta.json");
    const DecodeResult d = decode_solution(Grid(l->eol, l->iter), parse_point(point_s), l->unit);
    std::cout << d.describe() << "\n";
    if (d.kind == DecodeKind::NotInSolutionRegion) rc = kCounterexample;
  });

  // reduce
  auto* red = app.add_subcommand("reduce", "Apply one reduction to a bundle");
  std::string from, to;
  std::size_t pad_dim = 0;
  red->add_option("--from", from, "kkt | gdls | gdfp | gclo")->required();
  red->add_option("--to", to, "gdls | gdfp | kkt | gclo | gclo2d | clo-norm | clo-pad | brouwer")->required();
  red->add_option("--instance", inst_dir)->required();
  red->add_option("--dim", pad_dim, "target dimension for clo-pad");
  red->add_option("-o,--out", out)->required();
  red->callback([&] {
    std::string rule;
    if (from == "kkt" && to == "gdls") {
      auto r = kkt_to_gdls(load_kkt(inst_dir));
      save_gd(out, r.instance);
      copy_layout(inst_dir, out);
      rule = r.back.rule;
    } else if (from == "gdls" && to == "gdfp") {
      auto r = gdls_to_gdfp(load_gd(inst_dir));
      save_gd(out, r.instance);
      copy_layout(inst_dir, out);
      rule = r.back.rule;
    } else if (from == "gdfp" && to == "kkt") {
      auto r = gdfp_to_kkt(load_gd(inst_dir));
      save_kkt(out, r.instance);
      copy_layout(inst_dir, out);
      rule = r.back.rule;
    } else if (from == "gdls" && to == "gclo") {
      auto r = gdls_to_gclo(load_gd(inst_dir));
      save_gclo(out, r.instance);
      rule = r.back.rule;
    } else if (from == "gclo" && to == "gclo2d") {
      auto r = gclo_clamp_2d(load_gclo(inst_dir));
      save_gclo(out, r.instance);
      rule = r.back.rule;
    } else if (from == "gclo" && to == "clo-norm") {
      auto r = clo_normalize_codomain(load_gclo(inst_dir));
      save_gclo(out, r.instance);
      rule = r.back.rule;
    } else if (from == "gclo" && to == "clo-pad") {
      auto r = clo_pad_dimension(load_gclo(inst_dir), pad_dim);
      save_gclo(out, r.instance);
      rule = r.back.rule;
    } else if (from == "gclo" && to == "brouwer") {
      auto r = gclo_to_brouwer(load_gclo(inst_dir));
      save_brouwer(out, r.instance);
      rule = r.back.rule;
    } else {
      throw CLI::ValidationError("no reduction from '" + from + "' to '" + to + "'");
    }
    std::cout << "wrote " << out << "\nback-map " << rule << "\n" << read_file(out + "/meta.json");
  });

  // approx-linear
  auto* apx = app.add_subcommand("approx-linear", "Compile a Lipschitz circuit into a linear circuit");
  std::string L_s, eps_s, M_s;
  bool gd_fd = false;
  apx->add_option("--circuit", circuit_path);
  apx->add_option("--L", L_s);
  apx->add_option("--eps", eps_s);
  apx->add_option("--M", M_s, "bound on |f| (default: from the grid values)");
  apx->add_flag("--gd-fd", gd_fd, "build a finite-difference GD bundle from --instance (local_search gd bundle)");
  apx->add_option("--instance", inst_dir);
  apx->add_option("-o,--out", out)->required();
  apx->callback([&] {
    std::optional<Rational> M;
    if (!M_s.empty()) M = parse_rational(M_s);
    if (gd_fd) {
      if (inst_dir.empty()) throw CLI::ValidationError("--gd-fd needs --instance");
      const GdFdInstance g = gd_fd_instance(load_gd(inst_dir), M);
      save_gdfd(out, g);
      std::cout << "eps " << to_string(g.eps) << "\nh " << to_string(g.h) << "\ndelta " << to_string(g.approx.eps)
                << "\nsize(F) " << circuit_size(g.approx.F.circuit()) << "\n";
      return;
    }
    if (circuit_path.empty() || L_s.empty() || eps_s.empty())
      throw CLI::ValidationError("approx-linear needs --circuit, --L and --eps");
    ApproxOptions o;
    o.M = M;
    const LinearApprox a = approximate_circuit(parse_arith(read_file(circuit_path)), parse_rational(L_s),
                                               parse_rational(eps_s), o);
    save_linear(out, a.F);
    std::cout << "N " << a.params.N.get_str() << "\nk " << a.params.k << "\nm " << a.m << "\nM " << to_string(a.M)
              << "\nsize(F) " << circuit_size(a.F.circuit()) << "\nlipschitz_bound "
              << to_string(linear_lipschitz_bound(a.F)) << "\n";
  });

  // verify-squares
  auto* ver = app.add_subcommand("verify-squares", "Enumerate small-square archetypes, export SMT, falsify");
  std::string smt_dir, report_path = "falsify-report.json", results_dir, solver, gap_s = "4", veps_s = "1/100";
  bool falsify = false, serial = false;
  int density = 64, trials = 32, timeout_s = 30;
  std::uint64_t vseed = 1;
  ver->add_option("--instance", inst_dir, "kkt bundle with layout (default: built-in desk and coverage pairs)");
  ver->add_option("--export-smt", smt_dir, "write <key>.smt2 files and manifest.json here");
  ver->add_flag("--falsify", falsify, "run the sampling falsifier");
  ver->add_option("--report", report_path, "falsifier report path");
  ver->add_option("--eps", veps_s);
  ver->add_option("--gap", gap_s, "consecutive colours differ by more than this");
  ver->add_option("--density", density);
  ver->add_option("--trials", trials);
  ver->add_option("--seed", vseed);
  ver->add_flag("--serial", serial, "use the serial falsifier kernel");
  ver->add_option("--results", results_dir, "read <key>.result files with solver output");
  ver->add_option("--solver", solver, "run this SMT solver (z3 syntax) on the exported scripts");
  ver->add_option("--timeout", timeout_s, "solver timeout per script in seconds");
  ver->callback([&] {
    Enumeration e;
    if (!inst_dir.empty()) {
      auto l = load_layout(inst_dir);
      if (!l) throw Error(Errc::ParseError, inst_dir + " has no layout-meta.json");
      e = enumerate_archetypes(Grid(l->eol, l->iter));
    } else {
      e = enumerate_archetypes(Grid(desk_eol(), desk_iter()));
      merge_enumeration(e, enumerate_archetypes(Grid(coverage_eol(), coverage_iter())));
    }
    std::cout << "archetypes interior " << e.interior() << " (reference 101), boundary " << e.boundary()
              << " (reference 12)\n";
    for (const auto& o : all_origin_names())
      if (!e.origins_seen.count(o)) std::cout << "  gadget not present: " << o << "\n";
    const Rational eps = parse_rational(veps_s), gap = parse_rational(gap_s);
    std::size_t bad = 0;
    if (!smt_dir.empty()) {
      export_smt(e, SmtOptions{eps, gap}, smt_dir);
      std::cout << "wrote " << e.archetypes.size() << " scripts to " << smt_dir << "\n";
      std::vector<std::string> keys;
      for (const auto& [a, t] : e.archetypes) keys.push_back(a.canonical_key());
      std::map<std::string, SmtVerdict> res;
      if (!solver.empty()) {
        for (const auto& k : keys) {
          res[k] = run_smt_solver(solver, smt_dir + "/" + k + ".smt2", timeout_s);
          write_file(smt_dir + "/" + k + ".result", std::string(smt_verdict_name(res[k])) + "\n");
        }
      } else if (!results_dir.empty()) {
        res = read_smt_results(results_dir, keys);
      }
      if (!res.empty()) {
        std::map<std::string, int> tally;
        for (const auto& [a, t] : e.archetypes) {
          const SmtVerdict v = res[a.canonical_key()];
          ++tally[smt_verdict_name(v)];
          if (!t.expect_sat() && v != SmtVerdict::Unsat) {
            std::cout << "  expected unsat, got " << smt_verdict_name(v) << ": " << a.canonical_key() << "\n";
            if (v == SmtVerdict::Sat) ++bad;
          }
        }
        for (const auto& [k, n] : tally) std::cout << "smt " << k << " " << n << "\n";
      }
    }
    if (falsify) {
      FalsifyOptions fo;
      fo.eps = eps;
      fo.gap = gap;
      fo.density = density;
      fo.color_trials = trials;
      fo.seed = vseed;
      const auto rows = serial ? falsify_all_serial(e, fo) : falsify_all_parallel(e, fo);
      nlohmann::ordered_json rep;
      rep["eps"] = to_string(eps);
      rep["gap"] = to_string(gap);
      rep["density"] = density;
      rep["color_trials"] = trials;
      rep["seed"] = vseed;
      auto& list = rep["archetypes"] = nlohmann::ordered_json::array();
      std::size_t found = 0, sol_missed = 0;
      for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["key"] = r.archetype.canonical_key();
        j["expected"] = r.expect_sat ? "sat" : "unsat";
        if (r.cex) {
          ++found;
          j["counterexample"] = {{"x", to_string(r.cex->x)}, {"y", to_string(r.cex->y)},
                                 {"fx", to_string(r.cex->fx)}, {"fy", to_string(r.cex->fy)}};
          if (!r.expect_sat) {
            ++bad;
            std::cout << "  counterexample in non-solution archetype " << j["key"].get<std::string>() << "\n";
          }
        } else if (r.expect_sat) {
          ++sol_missed;
        }
        list.push_back(j);
      }
      write_file(report_path, rep.dump(2) + "\n");
      std::cout << "falsifier: " << found << " archetypes with near-stationary points, " << sol_missed
                << " solution-only archetypes without one; report " << report_path << "\n";
    }
    std::cout << "corner check " << (corner_check(Grid(desk_eol(), desk_iter()), eps) ? "pass" : "FAIL") << "\n";
    if (bad) rc = kCounterexample;
  });

  // render
  auto* ren = app.add_subcommand("render", "Draw grid colours and arrows as SVG");
  std::string window_s;
  ren->add_option("--instance", inst_dir)->required();
  ren->add_option("--window", window_s, "x0,y0,x1,y1 in grid coordinates")->required();
  ren->add_option("-o,--out", out)->required();
  ren->callback([&] {
    auto l = load_layout(inst_dir);
    if (!l) throw Error(Errc::ParseError, inst_dir + " has no layout-meta.json");
    const Vec w = parse_point(window_s);
    if (w.size() != 4) throw CLI::ValidationError("--window needs four numbers");
    render_svg(Grid(l->eol, l->iter), Box{{w[0], w[1]}, {w[2], w[3]}}, out);
    std::cout << "wrote " << out << "\n";
  });

  // selftest
  auto* st = app.add_subcommand("selftest", "Run the embedded invariant suite");
  st->callback([&] {
    if (run_selftest(std::cout)) rc = kCounterexample;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return (e.code() == Errc::BudgetExceeded || e.code() == Errc::GuardExceeded) ? kBudget : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return rc;
}
