#include "cls/selftest.hpp"

#include "cls/builder.hpp"
#include "cls/instances.hpp"
#include "cls/kkt_compiler.hpp"
#include "cls/linear_approx.hpp"
#include "cls/reductions.hpp"
#include "cls/square_verifier.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <random>

namespace cls {

namespace {

Rational rand_rat(std::mt19937_64& rng, long lo, long hi, long den) {
  std::uniform_int_distribution<long> d(lo * den, hi * den);
  return normalize(Integer(d(rng)), Integer(den));
}

}  // namespace

int run_selftest(std::ostream& os) {
  int failures = 0;
  auto check = [&](const char* name, const std::function<bool()>& body) {
    bool ok = false;
    std::string why;
    try {
      ok = body();
    } catch (const std::exception& e) {
      why = std::string(" (") + e.what() + ")";
    }
    os << (ok ? "ok   " : "FAIL ") << name << why << "\n";
    failures += !ok;
  };
  std::mt19937_64 rng(20240601);

  check("rationals print canonically and reparse", [&] {
    for (int i = 0; i < 200; ++i) {
      const Rational r = rand_rat(rng, -50, 50, 7 + i);
      if (parse_rational(to_string(r)) != r) return false;
    }
    return to_string(parse_rational("-6/4")) == "-3/2";
  });

  check("desk EOL solutions are 3, 7, 8", [&] {
    return all_eol_solutions(desk_eol()) == std::vector<std::uint64_t>{3, 7, 8};
  });
  check("desk Iter solutions are 3, 7", [&] {
    return all_iter_solutions(desk_iter()) == std::vector<std::uint64_t>{3, 7};
  });

  const Grid g(desk_eol(), desk_iter());
  const std::int64_t N = g.spec().N;

  check("adjacent patches agree on shared edges", [&] {
    std::uniform_int_distribution<std::int64_t> sq(0, N - 2);
    for (int i = 0; i < 200; ++i) {
      const std::int64_t x = sq(rng), y = sq(rng);
      const Rational t = rand_rat(rng, 0, 1, 97);
      const ValueGrad a = eval_patch(square_patch(g, x, y), 1, t);
      const ValueGrad b = eval_patch(square_patch(g, x + 1, y), 0, t);
      if (a.f != b.f || a.grad != b.grad) return false;
    }
    return true;
  });

  check("emitted circuits match the direct evaluator", [&] {
    const EmittedCircuits ec = emit_circuits(g);
    for (int i = 0; i < 4; ++i) {
      const Vec p{rand_rat(rng, 0, N, 1000), rand_rat(rng, 0, N, 1000)};
      const ValueGrad vg = eval_direct(g, p);
      if (eval_arith(ec.f, p)[0] != vg.f || eval_arith(ec.grad, p) != vg.grad) return false;
    }
    return is_well_behaved(ec.f) && is_well_behaved(ec.grad);
  });

  check("integer decoder agrees with decode_solution", [&] {
    std::uniform_int_distribution<std::int64_t> sq(0, N - 1);
    for (int i = 0; i < 2000; ++i) {
      const std::int64_t x = sq(rng), y = sq(rng);
      const DecodeResult d = decode_solution(g, {Rational(2 * x + 1, 2), Rational(2 * y + 1, 2)}, false);
      if (in_solution_region(g, x, y) != (d.kind != DecodeKind::NotInSolutionRegion)) return false;
    }
    return true;
  });

  check("median network sorts", [&] {
    const LinearCircuit net = median_network(7);
    for (int i = 0; i < 200; ++i) {
      Vec v;
      for (int k = 0; k < 7; ++k) v.push_back(rand_rat(rng, -9, 9, 5));
      Vec sorted = v;
      std::sort(sorted.begin(), sorted.end());
      if (eval_linear(net, v) != sorted) return false;
    }
    return true;
  });

  check("Boolean tables simulate exactly in arithmetic", [&] {
    std::vector<std::uint64_t> table(16);
    for (auto& t : table) t = rng() % 8;
    const BoolCircuit b = table_to_bool(table, 4, 3);
    const ArithCircuit a = bool_to_arith(b);
    for (std::uint64_t v = 0; v < 16; ++v) {
      const Bits in = to_bits(v, 4);
      Vec x;
      for (auto bit : in) x.push_back(bit);
      const Bits out = eval_bool(b, in);
      const Vec y = eval_arith(a, x);
      for (std::size_t k = 0; k < out.size(); ++k)
        if (y[k] != out[k]) return false;
      if (from_bits(out) != table[v]) return false;
    }
    return true;
  });

  check("kkt -> gdls parameters are eps^2/8L and 1/L", [&] {
    KktInstance k;
    k.eps = Rational(1, 10);
    k.L = 3;
    k.domain.box = Box::unit(1);
    Builder bf(1), bg(1);
    k.f = bf.finish({bf.input(0)});
    k.grad_f = bg.finish({bg.constant(1)});
    const auto r = kkt_to_gdls(k);
    return r.instance.eps == Rational(1, 2400) && r.instance.eta == Rational(1, 3);
  });

  check("domain corners of the desk grid are not eps-KKT", [&] { return corner_check(g, Rational(1, 100)); });

  check("falsifier: all-black square has no near-stationary point", [&] {
    Archetype a;
    a.corners.fill(PointData{Color::Black, Arrow::Left});
    return !falsify_sample(a, FalsifyOptions{});
  });

  return failures;
}

}  // namespace cls
