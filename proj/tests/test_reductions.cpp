#include "circ.hpp"
#include "cls/instances.hpp"
#include "cls/kkt_compiler.hpp"
#include "cls/reductions.hpp"
#include "cls/scans.hpp"
#include "util.hpp"

#include <doctest.h>

using namespace cls;
using testutil::C;
using testutil::R;

namespace {

// f(x, y) = x y + x / 3 on [0,1]^2, grad = (y + 1/3, x); 2-Lipschitz with a
// 1-Lipschitz gradient.
KktInstance toy_kkt(const Rational& eps) {
  KktInstance k;
  k.eps = eps;
  k.domain.box = Box::unit(2);
  C f(2);
  const int x = f.in(0), y = f.in(1);
  k.f = f.out({f.plus(f.mul(x, y), f.mulc(R("1/3"), x))});
  C g(2);
  const int gx = g.in(0), gy = g.in(1);
  k.grad_f = g.out({g.plus(gy, g.k(R("1/3"))), gx});
  k.L = 2;
  return k;
}

GdInstance toy_gd(GdMode mode, const Rational& eps, const Rational& eta, const Rational& L) {
  const KktInstance k = toy_kkt(eps);
  GdInstance g;
  g.mode = mode;
  g.eps = eps;
  g.eta = eta;
  g.domain = k.domain;
  g.f = k.f;
  g.grad_f = k.grad_f;
  g.L = L;
  return g;
}

// p, g on [0,1]^n given by circuits.
GcloInstance gclo(const ArithCircuit& p, const ArithCircuit& g, std::size_t n, const Rational& eps,
                  const Rational& L) {
  GcloInstance c;
  c.eps = eps;
  c.domain.box = Box::unit(n);
  c.p = p;
  c.g = g;
  c.L = L;
  return c;
}

const KktInstance& desk_kkt() {
  static const KktInstance k = emit_instance(Grid(desk_eol(), desk_iter()));
  return k;
}

}  // namespace

TEST_CASE("gdls_to_gdfp parameters") {
  auto r = gdls_to_gdfp(toy_gd(GdMode::LocalSearch, R("1/2"), 1, 8));
  CHECK(r.instance.eps == R("1/16"));
  CHECK(r.instance.mode == GdMode::Fixpoint);
  CHECK(r.instance.eta == 1);
  CHECK(gdls_to_gdfp(toy_gd(GdMode::LocalSearch, R("1/2"), 1, 1)).instance.eps == R("1/2"));
  CHECK_THROWS_AS(gdls_to_gdfp(toy_gd(GdMode::Fixpoint, 1, 1, 1)), Error);
}

TEST_CASE("gdls_to_gdfp back-map") {
  const GdInstance src = toy_gd(GdMode::LocalSearch, R("1/2"), R("1/4"), 2);
  auto r = gdls_to_gdfp(src);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec x = testutil::rand_vec(rng, 2, 0, 1);
    if (!check_gd(r.instance, x).is_solution()) continue;
    const BackMapResult b = r.back.apply(x);
    CHECK(b.point == x);
    CHECK(b.verdict.is_solution());
  }
  CHECK(r.back.rule == "x -> x");
}

TEST_CASE("gdfp_to_kkt parameters and back-map") {
  auto r = gdfp_to_kkt(toy_gd(GdMode::Fixpoint, R("1/10"), R("1/2"), 2));
  CHECK(r.instance.eps == R("1/5"));
  CHECK(gdfp_to_kkt(toy_gd(GdMode::Fixpoint, R("1/10"), 1, 2)).instance.eps == R("1/10"));
  // every eps'-KKT point is an eps-approximate fixpoint
  std::mt19937_64 rng(7);
  int seen = 0;
  for (int i = 0; i < 3000; ++i) {
    Vec x = testutil::rand_vec(rng, 2, 0, 1, 6);
    if (i % 3 == 0) x[0] = 0;
    if (!check_kkt(r.instance, x).is_solution()) continue;
    ++seen;
    const BackMapResult b = r.back.apply(x);
    CHECK(b.point == x);
    CHECK(b.verdict.is_solution());
  }
  CHECK(seen > 0);
  CHECK_THROWS_AS(gdfp_to_kkt(toy_gd(GdMode::LocalSearch, 1, 1, 1)), Error);
}

TEST_CASE("kkt_to_gdls parameters") {
  KktInstance k = toy_kkt(R("1/100"));
  k.L = pow2(28);
  auto r = kkt_to_gdls(k);
  CHECK(r.instance.eps == 1 / (Rational(80000) * pow2(28)));
  CHECK(r.instance.eta == 1 / pow2(28));
  CHECK(r.instance.mode == GdMode::LocalSearch);
}

TEST_CASE("kkt_to_gdls back-map: f(x) = x on [0,1]") {
  KktInstance k;
  k.eps = R("1/10");
  k.domain.box = Box::unit(1);
  k.f = testutil::identity(1);
  k.grad_f = testutil::constant(1, {1});
  k.L = 1;
  auto r = kkt_to_gdls(k);
  CHECK(r.instance.eps == R("1/800"));
  // GDLS solutions are x <= 1/800; y = Pi(x - 1) = 0 is a boundary KKT point
  const Vec x{R("1/1600")};
  CHECK(check_gd(r.instance, x).is_solution());
  CHECK_FALSE(check_gd(r.instance, {R("1/2")}).is_solution());
  const BackMapResult b = r.back.apply(x);
  CHECK(b.point == Vec{0});
  CHECK(b.verdict.is_solution());
  CHECK(check_kkt(k, b.point).is_solution());
}

TEST_CASE("kkt_to_gdls back-map: zero gradient") {
  KktInstance k;
  k.eps = R("1/10");
  k.domain.box = Box::unit(2);
  k.f = testutil::constant(2, {5});
  k.grad_f = testutil::constant(2, {0, 0});
  k.L = 1;
  const Vec x{R("1/3"), R("2/3")};
  const BackMapResult b = kkt_to_gdls(k).back.apply(x);
  CHECK(b.point == x);
  CHECK(b.verdict.is_solution());
}

TEST_CASE("kkt_to_gdls back-map surfaces a Taylor violation") {
  // f jumps while grad f claims 0
  KktInstance k;
  k.eps = R("1/100");
  k.domain.box = Box::unit(1);
  C f(1);
  k.f = f.out({f.add(Op::Cmp, f.in(0), f.k(R("1/2")))});
  k.grad_f = testutil::constant(1, {1});
  k.L = 1;
  // x = 1/2 + tiny: y = Pi(x - 1) = 0, f drops by 1 while <grad, y - x> = -x
  const BackMapResult b = kkt_to_gdls(k).back.apply({R("3/4")});
  CHECK(b.point == Vec{0});
  CHECK(b.verdict.is_solution());  // y = 0 is KKT for grad 1
  k.grad_f = testutil::constant(1, {R("1/2")});
  const BackMapResult c = kkt_to_gdls(k).back.apply({R("3/4")});
  CHECK(c.point == Vec{R("1/4")});
  CHECK(c.verdict.kind == VerdictKind::ViolationTaylor);
  CHECK(c.verdict.witness.size() == 2);
}

TEST_CASE("gdls_to_gclo") {
  CHECK(gdls_to_gclo(toy_gd(GdMode::LocalSearch, 1, 1, 3)).instance.L == 4);
  CHECK(gdls_to_gclo(toy_gd(GdMode::LocalSearch, 1, R("1/8"), 8)).instance.L == 8);
  const GdInstance src = toy_gd(GdMode::LocalSearch, R("1/20"), R("1/4"), 2);
  auto r = gdls_to_gclo(src);
  CHECK(r.instance.p.gates.size() == src.f.gates.size());
  CHECK(is_well_behaved(r.instance.g));
  CHECK(true_mul_depth(r.instance.g) == true_mul_depth(src.grad_f));
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    const Vec x = testutil::rand_vec(rng, 2, 0, 1);
    CHECK(r.instance.eval_g(x) == x - src.eta * eval_arith(src.grad_f, x));
    CHECK(check_gclo(r.instance, x).is_solution() == check_gd(src, x).is_solution());
    if (check_gclo(r.instance, x).is_solution()) {
      const BackMapResult b = r.back.apply(x);
      CHECK(b.point == x);
      CHECK(b.verdict.is_solution());
    }
  }
}

TEST_CASE("gclo_clamp_2d") {
  C g(2);
  g.in(0);
  g.in(1);
  const ArithCircuit out = g.out({g.k(R("3/2")), g.k(R("-1/5"))});
  auto r = gclo_clamp_2d(gclo(testutil::constant(2, {0}), out, 2, R("1/10"), 1));
  CHECK(eval_arith(r.instance.g, {R("1/3"), R("1/3")}) == Vec{1, 0});
  CHECK(r.instance.L == 1);
  auto id = gclo_clamp_2d(gclo(testutil::identity(2), testutil::identity(2), 2, R("1/10"), 1));
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const Vec x = testutil::rand_vec(rng, 2, 0, 1);
    CHECK(eval_arith(id.instance.g, x) == x);
  }
  GcloInstance bad = gclo(testutil::identity(1), testutil::identity(1), 1, 1, 1);
  CHECK_THROWS_AS(gclo_clamp_2d(bad), Error);
}

TEST_CASE("clamping never increases distances") {
  // a violation of g' on a pair is a violation of g on the same pair
  std::mt19937_64 rng(19);
  C g(2);
  const int a = g.in(0), b = g.in(1);
  const ArithCircuit gc = g.out({g.mulc(3, a), g.minus(b, g.k(2))});
  auto r = gclo_clamp_2d(gclo(testutil::constant(2, {0}), gc, 2, R("1/10"), 2));
  for (int i = 0; i < 300; ++i) {
    const Vec x = testutil::rand_vec(rng, 2, 0, 1), y = testutil::rand_vec(rng, 2, 0, 1);
    if (check_lipschitz(r.instance.g, 2, x, y, KktNorm::l2).is_violation())
      CHECK(check_lipschitz(gc, 2, x, y, KktNorm::l2).is_violation());
  }
}

TEST_CASE("clo_normalize_codomain") {
  auto k = clo_normalize_codomain(gclo(testutil::constant(2, {7}), testutil::identity(2), 2, R("1/10"), 1));
  CHECK(k.instance.eps == R("1/40"));
  CHECK(eval_arith(k.instance.p, {R("1/5"), R("4/5")}) == Vec{R("1/2")});
  CHECK(k.instance.L == 1);
  CHECK(clo_normalize_codomain(gclo(testutil::constant(2, {7}), testutil::identity(2), 2, 1, R("1/8")))
            .instance.L == R("1/4"));
  // p(x) = 10 x_1 claims L = 1: the clamp engages at x = (1, 1/2) and
  // (x, z_c) exhibits the violation
  const ArithCircuit p = testutil::linear({10, 0});
  const ArithCircuit g = testutil::constant(2, {0, R("1/2")});
  auto r = clo_normalize_codomain(gclo(p, g, 2, R("1/10"), 1));
  CHECK(eval_arith(r.instance.p, {1, R("1/2")}) == Vec{1});
  const BackMapResult b = r.back.apply({1, R("1/2")});
  CHECK(b.verdict.kind == VerdictKind::ViolationLipschitzF);
  REQUIRE(b.verdict.witness.size() == 2);
  CHECK(b.verdict.witness[1] == Vec{R("1/2"), R("1/2")});
}

TEST_CASE("clo_pad_dimension") {
  C g(2);
  const int a = g.in(0), b = g.in(1);
  const ArithCircuit gc = g.out({b, a});
  const GcloInstance src = gclo(testutil::linear({1, 1}), gc, 2, R("1/10"), 2);
  auto r = clo_pad_dimension(src, 3);
  CHECK(r.instance.domain.box == Box::unit(3));
  CHECK(r.instance.L == src.L);
  CHECK(r.instance.p.num_inputs == 3);
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    const Vec x = testutil::rand_vec(rng, 3, 0, 1);
    const Vec gx = eval_arith(r.instance.g, x);
    CHECK(gx[2] == 0);
    CHECK(gx[0] == x[1]);
    CHECK(eval_arith(r.instance.p, x)[0] == x[0] + x[1]);
  }
  const BackMapResult bm = r.back.apply({R("1/3"), R("1/3"), R("9/10")});
  CHECK(bm.point == Vec{R("1/3"), R("1/3")});
  CHECK(bm.verdict.is_solution());
  CHECK_THROWS_AS(clo_pad_dimension(src, 2), Error);
}

TEST_CASE("gclo_to_brouwer") {
  auto r = gclo_to_brouwer(gclo(testutil::identity(1), testutil::identity(1), 1, R("1/10"), 10));
  CHECK(r.instance.eps == R("1/100"));
  std::mt19937_64 rng(29);
  for (int i = 0; i < 50; ++i) CHECK(is_brouwer_solution(r.instance, testutil::rand_vec(rng, 1, 0, 1)));
  // g(x) = 1 - x on [0,1] with p(x) = x: the fixed point 1/2 is a GCLO
  // solution
  auto s = gclo_to_brouwer(gclo(testutil::identity(1), testutil::linear({-1}, 1), 1, R("1/10"), 1));
  CHECK(is_brouwer_solution(s.instance, {R("1/2")}));
  CHECK_FALSE(is_brouwer_solution(s.instance, {R("1/5")}));
  CHECK(s.back.apply({R("1/2")}).verdict.is_solution());
  CHECK(s.back.witness_pairs.find("Pi_D(g(x*))") != std::string::npos);
}

TEST_CASE("either_combine") {
  const EitherInstance e = either_combine(desk_eol(), desk_iter());
  CHECK(check_either(e, EitherSide::Eol, 3));
  CHECK(check_either(e, EitherSide::Iter, 7));
  CHECK_FALSE(check_either(e, EitherSide::Eol, 5));
  CHECK_FALSE(check_either(e, EitherSide::Iter, 2));
}

TEST_CASE("reductions preserve domains and well-behavedness") {
  const KktInstance k = toy_kkt(R("1/10"));
  auto a = kkt_to_gdls(k);
  auto b = gdls_to_gdfp(a.instance);
  auto c = gdfp_to_kkt(b.instance);
  auto d = gdls_to_gclo(a.instance);
  CHECK(a.instance.domain == k.domain);
  CHECK(b.instance.domain == k.domain);
  CHECK(c.instance.domain == k.domain);
  CHECK(d.instance.domain == k.domain);
  for (const ArithCircuit* x : {&a.instance.f, &b.instance.grad_f, &c.instance.f, &d.instance.p, &d.instance.g})
    CHECK(is_well_behaved(*x));
  auto e = gclo_clamp_2d(d.instance);
  auto f = clo_normalize_codomain(e.instance);
  auto g = clo_pad_dimension(f.instance, 4);
  CHECK(e.instance.domain == d.instance.domain);
  CHECK(f.instance.domain == d.instance.domain);
  for (const ArithCircuit* x : {&e.instance.g, &f.instance.p, &g.instance.p, &g.instance.g}) CHECK(is_well_behaved(*x));
}

TEST_CASE("desk roundtrip parameters and back-maps") {
  const KktInstance& k = desk_kkt();
  auto a = kkt_to_gdls(k);
  auto b = gdls_to_gdfp(a.instance);
  auto c = gdfp_to_kkt(b.instance);
  const Rational e1 = k.eps * k.eps / (8 * k.L);
  CHECK(a.instance.eps == e1);
  CHECK(a.instance.eta == 1 / k.L);
  CHECK(b.instance.eps == e1 / k.L);
  CHECK(c.instance.eps == e1);
  const Grid g(desk_eol(), desk_iter());
  // stationary points in the Iter solution squares of the LB labyrinth
  for (auto [x, y] : {std::pair<long, long>{200, 180}, {216, 164}}) {
    const auto p = locate_stationary(g, x, y, c.instance.eps / 4);
    REQUIRE(p.has_value());
    CHECK(check_kkt(c.instance, *p).is_solution());
    const BackMapResult r3 = c.back.apply(*p);
    const BackMapResult r2 = b.back.apply(r3.point);
    const BackMapResult r1 = a.back.apply(r2.point);
    CHECK(r3.verdict.is_solution());
    CHECK(r2.verdict.is_solution());
    CHECK(r1.verdict.is_solution());
    CHECK(check_kkt(k, r1.point).is_solution());
    CHECK(decode_solution(g, r1.point, false).kind == DecodeKind::IterSolution);
  }
}

TEST_CASE("back-maps on compiler output never report violations") {
  const KktInstance& k = desk_kkt();
  auto a = kkt_to_gdls(k);
  auto b = gdls_to_gdfp(a.instance);
  auto c = gdls_to_gclo(a.instance);
  auto d = gclo_to_brouwer(c.instance);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    const Vec x = testutil::rand_vec(rng, 2, 0, 1024, 8);
    CHECK_FALSE(a.back.apply(x).verdict.is_violation());
    CHECK_FALSE(b.back.apply(x).verdict.is_violation());
    CHECK_FALSE(d.back.apply(x).verdict.is_violation());
  }
}
