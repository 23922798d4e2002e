// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "cls/instances.hpp"
#include "cls/io.hpp"
#include "cls/linear_approx.hpp"
#include "cls/reductions.hpp"
#include "cls/scans.hpp"
#include "cls/solvers.hpp"
#include "cls/square_verifier.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace cls;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  std::uint64_t gd_iters = 100000;
  int gd_starts = 20;
  int smt_timeout = 5;
  bool smt = true;
  std::string only;
};

const Grid& desk() {
  static const Grid g(desk_eol(), desk_iter());
  return g;
}

const KktInstance& desk_kkt() {
  static const KktInstance k = emit_instance(desk());
  return k;
}

Rational rand_rat(std::mt19937_64& rng, long lo, long hi, int den_bits) {
  std::uniform_int_distribution<long> d(1, (1L << den_bits) - 1);
  const long den = d(rng);
  std::uniform_int_distribution<long> n(lo * den, hi * den);
  return normalize(Integer(n(rng)), Integer(den));
}

// regime values and gaps at every grid point, both kernels
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const RegimeScanResult p = regime_scan_parallel(desk());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const RegimeScanResult s = regime_scan_serial(desk());
  std::ostringstream os;
  os << p.points << " points, value mismatches " << p.value_mismatches << ", arrow mismatches "
     << p.arrow_mismatches << ", gap violations " << p.gap_violations << ", min gap " << p.min_gap
     << ", serial == parallel " << (s == p) << ", " << secs << " s (limit 300)";
  const bool ok = p.points == 1025u * 1025u && p.value_mismatches == 0 && p.arrow_mismatches == 0 &&
                  p.gap_violations == 0 && p.min_gap >= 10 && s == p && secs <= 300;
  return {ok, os.str()};
}

// derivative of the patch taken from its coefficient matrix, Horner form
std::pair<Rational, Rational> symbolic_grad(const PatchCoeffs& pc, const Rational& u, const Rational& w) {
  Rational fx = 0, fy = 0;
  for (int i = 3; i >= 0; --i) {
    Rational rx = 0, ry = 0;
    for (int j = 3; j >= 0; --j) {
      rx = rx * w + (i < 3 ? Rational((i + 1) * pc.a[i + 1][j]) : Rational(0));
      ry = ry * w + (j < 3 ? Rational((j + 1) * pc.a[i][j + 1]) : Rational(0));
    }
    fx = fx * u + rx;
    fy = fy * u + ry;
  }
  return {fx, fy};
}

Outcome criterion2() {
  const Grid& g = desk();
  const std::int64_t N = g.spec().N;
  std::mt19937_64 rng(2);
  std::uint64_t interior = 0, edges = 0, bad_edges = 0, bad_grad = 0;
  auto same = [](const ValueGrad& a, const ValueGrad& b) { return a.f == b.f && a.grad == b.grad; };
  for (int k = 0; k < 9000; ++k) {
    const std::int64_t x = rng() % N, y = rng() % N;
    const Rational u = rand_rat(rng, 0, 1, 16), w = rand_rat(rng, 0, 1, 16);
    const ValueGrad d = eval_direct(g, {x + u, y + w});
    const auto [fx, fy] = symbolic_grad(square_patch(g, x, y), u, w);
    bad_grad += !(d.grad[0] == fx && d.grad[1] == fy);
    ++interior;
  }
  for (int k = 0; k < 2000; ++k) {
    const bool vertical = k % 2 == 0;
    const std::int64_t e = 1 + rng() % (N - 1), s = rng() % N;
    const Rational t = rand_rat(rng, 0, 1, 16);
    ValueGrad a, b;
    if (vertical) {
      a = eval_patch(square_patch(g, e - 1, s), 1, t);
      b = eval_patch(square_patch(g, e, s), 0, t);
    } else {
      a = eval_patch(square_patch(g, s, e - 1), t, 1);
      b = eval_patch(square_patch(g, s, e), t, 0);
    }
    bad_edges += !same(a, b);
    ++edges;
  }
  std::ostringstream os;
  os << interior + edges << " points (" << edges << " on shared edges), edge disagreements " << bad_edges
     << ", gradient vs symbolic derivative mismatches " << bad_grad;
  return {interior + edges >= 10000 && edges >= 1000 && bad_edges == 0 && bad_grad == 0, os.str()};
}

Outcome criterion3() {
  const Grid& g = desk();
  const KktInstance& k = desk_kkt();
  std::mt19937_64 rng(3);
  std::uint64_t mismatches = 0, audit_bad = 0;
  std::size_t worst_ratio_num = 0;
  const double size_f = static_cast<double>(circuit_size(k.f)), size_g = static_cast<double>(circuit_size(k.grad_f));
  for (int i = 0; i < 1000; ++i) {
    const Vec x{rand_rat(rng, 0, 1024, 12), rand_rat(rng, 0, 1024, 12)};
    const ValueGrad d = eval_direct(g, x);
    mismatches += eval_arith(k.f, x) != Vec{d.f};
    mismatches += eval_arith(k.grad_f, x) != d.grad;
    if (i % 10 == 0) {
      const double bx = static_cast<double>(bit_size(x));
      const std::size_t af = audit_value_sizes(k.f, x), ag = audit_value_sizes(k.grad_f, x);
      audit_bad += static_cast<double>(af) > 6 * size_f * size_f * size_f * bx;
      audit_bad += static_cast<double>(ag) > 6 * size_g * size_g * size_g * bx;
      worst_ratio_num = std::max({worst_ratio_num, af, ag});
    }
  }
  const bool wb = is_well_behaved(k.f) && is_well_behaved(k.grad_f);
  std::ostringstream os;
  os << "1000 points, mismatches " << mismatches << ", well-behaved " << wb << ", audited 100 points, largest value "
     << worst_ratio_num << " bits, over bound " << audit_bad;
  return {mismatches == 0 && wb && audit_bad == 0, os.str()};
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const DecoderScanResult r = decoder_scan_parallel(desk(), Rational(1, 100));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream os;
  os << r.squares << " squares, " << r.points << " lattice points (" << static_cast<double>(r.points) / r.squares
     << " per square), hits " << r.hits << " {";
  bool first = true;
  bool all_valid = true;
  for (const auto& [k, v] : r.by_decode) {
    os << (first ? "" : ", ") << k << ": " << v;
    first = false;
    all_valid &= k == "EolSolution(3)" || k == "EolSolution(7)" || k == "EolSolution(8)" ||
                 k == "IterSolution(3)" || k == "IterSolution(7)";
  }
  const bool same = decoder_scan_serial(desk(), Rational(1, 100)) == r;
  os << "}, unsound " << r.unsound << ", serial == parallel " << same << ", " << secs << " s (limit 1800)";
  const bool ok = r.points >= 9 * r.squares && r.unsound == 0 && all_valid && same && secs <= 1800;
  return {ok, os.str()};
}

Outcome criterion5(const Options& opt) {
  Enumeration e = enumerate_archetypes(desk());
  merge_enumeration(e, enumerate_archetypes(Grid(coverage_eol(), coverage_iter())));
  std::vector<std::string> missing;
  for (const auto& o : all_origin_names())
    if (!e.origins_seen.count(o) && o != "LA7" && o != "LB7") missing.push_back(o);  // LA7/LB7 have no cells
  FalsifyOptions fo;
  fo.density = 64;
  const auto rows = falsify_all_parallel(e, fo);
  std::size_t nonsol = 0, nonsol_cex = 0, sol = 0, sol_found = 0;
  for (const auto& r : rows) {
    if (r.expect_sat) {
      ++sol;
      sol_found += r.cex.has_value();
    } else {
      ++nonsol;
      nonsol_cex += r.cex.has_value();
    }
  }
  const bool corners = corner_check(desk(), Rational(1, 100));
  std::ostringstream os;
  os << "archetypes " << e.interior() << " interior / " << e.boundary() << " boundary";
  if (e.interior() != 101 || e.boundary() != 12) os << " (warning: reference counts 101 / 12)";
  os << ", uncovered gadgets " << missing.size() << ", falsifier: non-solution counterexamples " << nonsol_cex << "/"
     << nonsol << ", solution archetypes with a counterexample " << sol_found << "/" << sol << ", corners "
     << (corners ? "ok" : "KKT");
  bool ok = missing.empty() && nonsol_cex == 0 && sol_found == sol && corners;
  if (!opt.smt || !smt_solver_available("z3")) {
    os << ", smt: skipped (z3 not available)";
    return {ok, os.str()};
  }
  const std::string dir = (std::filesystem::temp_directory_path() / "cls_acceptance_smt").string();
  std::filesystem::remove_all(dir);
  export_smt(e, SmtOptions{}, dir);
  std::map<SmtVerdict, std::size_t> tally;
  std::size_t smt_bad = 0;
  for (const auto& [a, t] : e.archetypes) {
    if (t.expect_sat()) continue;
    const SmtVerdict v = run_smt_solver("z3", dir + "/" + a.canonical_key() + ".smt2", opt.smt_timeout);
    ++tally[v];
    smt_bad += v != SmtVerdict::Unsat;
  }
  os << ", smt (z3, " << opt.smt_timeout << " s per script) on non-solution archetypes:";
  for (const auto& [v, c] : tally) os << " " << smt_verdict_name(v) << " " << c;
  std::filesystem::remove_all(dir);
  ok = ok && smt_bad == 0;
  return {ok, os.str()};
}

Outcome criterion6() {
  const Grid& g = desk();
  const KktInstance& k = desk_kkt();
  const auto r1 = kkt_to_gdls(k);
  const auto r2 = gdls_to_gdfp(r1.instance);
  const auto r3 = gdfp_to_kkt(r2.instance);
  const Rational L = k.L;
  const Rational e1 = k.eps * k.eps / (8 * L);
  const bool params = r1.instance.eta == 1 / L && r1.instance.eps == e1 && r2.instance.eps == e1 / L &&
                      r2.instance.eta == r1.instance.eta && r3.instance.eps == r2.instance.eps / r2.instance.eta &&
                      r3.instance.eps == e1;
  const Rational tol = r3.instance.eps / 4;
  const GdInstance inner = fixpoint_view(r3.instance);
  std::size_t runs = 0, good = 0;
  std::ostringstream pts;
  for (auto [x, y] : {std::pair<std::int64_t, std::int64_t>{200, 180}, {216, 164}, {319, 319}}) {
    const auto p = locate_stationary(g, x, y, tol);
    if (!p) continue;
    ++runs;
    GdOptions o;
    o.max_iters = 1000;
    const GdResult r = projected_gd(inner, *p, o);
    if (r.status != GdStatus::Stopped) continue;
    const BackMapResult b3 = r3.back.apply(r.x);
    const BackMapResult b2 = r2.back.apply(b3.point);
    const BackMapResult b1 = r1.back.apply(b2.point);
    const bool ok = check_kkt(k, b1.point).is_solution();
    good += ok;
    pts << " (" << x << "," << y << ") " << decode_solution(g, b1.point, false).describe() << " after " << r.iters
        << " steps";
  }
  std::ostringstream os;
  os << "parameters exact " << params << ", eps' = " << to_string(e1) << ", start squares located " << runs
     << "/3, back-mapped KKT solutions " << good << ":" << pts.str();
  return {params && runs == 3 && good == runs, os.str()};
}

Outcome criterion7(const Options& opt) {
  const Grid& g = desk();
  const KktInstance unit = rescale(desk_kkt(), 1024);
  const GdInstance inst = fixpoint_view(unit);
  std::size_t stopped = 0, valid = 0, unsound = 0;
  GdOptions o;
  o.max_iters = opt.gd_iters;
  o.round_denom = Integer(1) << 48;
  const long den = 1L << 20;
  for (int s = 0; s < opt.gd_starts; ++s) {
    std::mt19937_64 rng(1000 + s);
    std::uniform_int_distribution<long> d(0, den);
    const Vec x0{normalize(Integer(d(rng)), Integer(den)), normalize(Integer(d(rng)), Integer(den))};
    const GdResult r = projected_gd(inst, x0, o);
    if (r.status != GdStatus::Stopped) continue;
    ++stopped;
    const DecodeResult dr = decode_solution(g, r.x, true);
    (dr.kind == DecodeKind::NotInSolutionRegion ? unsound : valid) += 1;
  }
  std::ostringstream os;
  os << opt.gd_starts << " starts, eta = 1/" << to_string(unit.L) << ", cap " << opt.gd_iters
     << " steps (iterates rounded to 2^-48): stopped " << stopped << ", decoded solutions " << valid
     << ", NotInSolutionRegion " << unsound;
  if (stopped == 0) os << " (no run stopped within the cap)";
  return {opt.gd_starts >= 20 && stopped > 0 && unsound == 0, os.str()};
}

ArithCircuit lc_half_sum() {
  ArithCircuit c;
  c.num_inputs = 2;
  c.gates = {{Op::Input, 0, -1, 0}, {Op::Input, 1, -1, 0}, {Op::Add, 0, 1, 0}, {Op::MulC, 2, -1, Rational(1, 2)}};
  c.outputs = {3};
  return c;
}

ArithCircuit lc_abs_diff() {
  ArithCircuit c;
  c.num_inputs = 2;
  c.gates = {{Op::Input, 0, -1, 0}, {Op::Input, 1, -1, 0}, {Op::Sub, 0, 1, 0}, {Op::Sub, 1, 0, 0},
             {Op::Max, 2, 3, 0}};
  c.outputs = {4};
  return c;
}

ArithCircuit lc_half_product() {
  ArithCircuit c;
  c.num_inputs = 2;
  c.gates = {{Op::Input, 0, -1, 0}, {Op::Input, 1, -1, 0}, {Op::Mul, 0, 1, 0}, {Op::MulC, 2, -1, Rational(1, 2)}};
  c.outputs = {3};
  return c;
}

Outcome criterion8() {
  std::ostringstream os;
  bool ok = true;
  const std::pair<const char*, ArithCircuit> circuits[] = {
      {"(x+y)/2", lc_half_sum()}, {"|x-y|", lc_abs_diff()}, {"xy/2", lc_half_product()}};
  Rational worst = 0;
  std::size_t worst_bad = 0, cross_bad = 0;
  for (const auto& [name, f] : circuits)
    for (const Rational eps : {Rational(1, 4), Rational(1, 16)}) {
      const LinearApprox a = approximate_circuit(f, 1, eps);
      const ScaledLinearEval fast(a.F, 255, Box::unit(2));
      Rational err = 0;
      for (int i = 0; i < 256; ++i)
        for (int j = 0; j < 256; ++j) {
          const Vec x{normalize(i, 255), normalize(j, 255)};
          const Rational F = fast.ok() ? fast.eval(x)[0] : eval_linear(a.F, x)[0];
          if (fast.ok() && (i * 256 + j) % 997 == 0) cross_bad += F != eval_linear(a.F, x)[0];
          err = std::max<Rational>(err, abs_rat(F - eval_arith(f, x)[0]));
          worst_bad = std::max(worst_bad, bad_sample_count(x, a.params));
        }
      ok = ok && err <= eps;
      worst = std::max<Rational>(worst, err / eps);
      os << name << " eps " << to_string(eps) << ": max |f-F| " << to_string(err) << "; ";
    }
  ok = ok && worst_bad <= 2 && cross_bad == 0;
  os << "max bad samples " << worst_bad << " (n = 2), evaluator cross-check mismatches " << cross_bad;
  std::mt19937_64 rng(8);
  std::size_t median_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const int count = 1 + 2 * static_cast<int>(rng() % 8);
    Vec v;
    for (int j = 0; j < count; ++j) v.push_back(rand_rat(rng, -100, 100, 8));
    const Vec out = eval_linear(median_network(count), v);
    std::sort(v.begin(), v.end());
    median_bad += out[count / 2] != v[count / 2];
  }
  ok = ok && median_bad == 0;
  os << "; median vs sort on 10^4 vectors: " << median_bad << " mismatches";
  // GD-FD on the n = m = 1 compiler instance
  try {
    const Grid g(eol_from_edges(1, {{1, 2}}), iter_from_map(1, {{1, 2}}));
    const KktInstance unit = rescale(emit_instance(g), Rational(static_cast<long>(g.spec().N)));
    const auto gd = kkt_to_gdls(unit);
    const GdFdInstance fd = gd_fd_instance(gd.instance);
    const GdFdRun r = gd_fd_solve(fd, {Rational(1, 2), Rational(1, 2)}, 100000);
    const bool solved = r.stopped && decode_solution(g, r.x, true).kind != DecodeKind::NotInSolutionRegion;
    os << "; GD-FD on the n = m = 1 instance: " << (solved ? "decoded solution" : "no decodable solution");
    ok = ok && solved;
  } catch (const Error& e) {
    os << "; GD-FD on the n = m = 1 instance: " << e.what();
    ok = false;
  }
  return {ok, os.str()};
}

Outcome criterion9() {
  std::mt19937_64 rng(9);
  std::size_t solved = 0, in_budget = 0;
  std::uint64_t max_probes = 0, max_grid = 0;
  for (int i = 0; i < 10; ++i) {
    GcloInstance g;
    g.eps = normalize(1, 1 + rng() % 10000);
    const Rational lo = rand_rat(rng, -2, 0, 6);
    g.domain.box = Box{{lo}, {lo + 1 + rand_rat(rng, 0, 3, 6)}};
    g.L = 1;
    // p(x) = x / 2, g(x) = max(a1 x + b1, a2 x + b2) with |a| <= 1/2
    const Rational a1 = rand_rat(rng, -1, 1, 6) / 2, a2 = rand_rat(rng, -1, 1, 6) / 2;
    const Rational b1 = rand_rat(rng, -2, 2, 6), b2 = rand_rat(rng, -2, 2, 6);
    g.p.num_inputs = 1;
    g.p.gates = {{Op::Input, 0, -1, 0}, {Op::MulC, 0, -1, Rational(1, 2)}};
    g.p.outputs = {1};
    g.g.num_inputs = 1;
    g.g.gates = {{Op::Input, 0, -1, 0}, {Op::MulC, 0, -1, a1}, {Op::Const, -1, -1, b1}, {Op::Add, 1, 2, 0},
                 {Op::MulC, 0, -1, a2}, {Op::Const, -1, -1, b2}, {Op::Add, 4, 5, 0}, {Op::Max, 3, 6, 0}};
    g.g.outputs = {7};
    const Solve1dResult r = solve_1d_gclo(g);
    const Rational width = g.domain.box.hi[0] - g.domain.box.lo[0];
    const Integer grid = ceil_rat(width * g.L * g.L / g.eps) + 1;
    solved += r.verdict.is_solution() && check_gclo(g, r.point).is_solution();
    in_budget += Integer(static_cast<unsigned long>(r.grid_points)) == grid && Integer(static_cast<unsigned long>(r.probes)) <= grid;
    max_probes = std::max(max_probes, r.probes);
    max_grid = std::max(max_grid, r.grid_points);
  }
  std::ostringstream os;
  os << "10 instances, checked solutions " << solved << ", within the grid-size budget " << in_budget
     << ", most probes " << max_probes << " (largest grid " << max_grid << " points)";
  return {solved == 10 && in_budget == 10, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  Options opt;
  bool no_smt = false;
  app.add_option("--gd-iters", opt.gd_iters, "step cap per GD run in criterion 7");
  app.add_option("--gd-starts", opt.gd_starts, "random starts in criterion 7");
  app.add_option("--smt-timeout", opt.smt_timeout, "z3 timeout per script (s)");
  app.add_flag("--no-smt", no_smt, "skip the external solver in criterion 5");
  app.add_option("--only", opt.only, "comma-separated criteria to run");
  CLI11_PARSE(app, argc, argv);
  opt.smt = !no_smt;

  const std::vector<std::function<Outcome()>> checks = {
      criterion1, criterion2, criterion3, criterion4, [&] { return criterion5(opt); },
      criterion6, [&] { return criterion7(opt); }, criterion8, criterion9};
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string id = std::to_string(i + 1);
    if (!opt.only.empty() && ("," + opt.only + ",").find("," + id + ",") == std::string::npos) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  [" << secs
              << " s]" << std::endl;
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
