#include "circ.hpp"
#include "cls/instances.hpp"
#include "cls/tfnp.hpp"
#include "util.hpp"

#include <doctest.h>

#include <set>

using namespace cls;
using testutil::R;

namespace {

// Tables are indexed by v - 1 and hold S(v) - 1.
EolInstance eol_tables(int n, const std::vector<std::uint64_t>& S, const std::vector<std::uint64_t>& P) {
  EolInstance e;
  e.n = n;
  auto z = [](std::vector<std::uint64_t> t) {
    for (auto& v : t) --v;
    return t;
  };
  e.S = table_to_bool(z(S), n, n);
  e.P = table_to_bool(z(P), n, n);
  return e;
}

IterInstance iter_table(int m, const std::vector<std::uint64_t>& C) {
  IterInstance it;
  it.m = m;
  std::vector<std::uint64_t> t = C;
  for (auto& v : t) --v;
  it.C = table_to_bool(t, m, m);
  return it;
}

// Solutions straight from the definition, on 1-based tables.
std::set<std::uint64_t> eol_oracle(const std::vector<std::uint64_t>& S, const std::vector<std::uint64_t>& P) {
  std::set<std::uint64_t> out;
  for (std::uint64_t v = 1; v <= S.size(); ++v) {
    const bool sink = P[S[v - 1] - 1] != v;
    const bool source = S[P[v - 1] - 1] != v && v != 1;
    if (sink || source) out.insert(v);
  }
  return out;
}

KktInstance box_kkt_instance(const Vec& grad, const Rational& eps) {
  KktInstance k;
  k.eps = eps;
  k.domain.box = Box::unit(grad.size());
  k.f = testutil::constant(static_cast<int>(grad.size()), {0});
  k.grad_f = testutil::constant(static_cast<int>(grad.size()), grad);
  k.L = 1;
  return k;
}

}  // namespace

TEST_CASE("desk EOL instance") {
  const EolInstance e = desk_eol();
  CHECK(check_eol(e, 3));
  CHECK_FALSE(check_eol(e, 1));
  CHECK_FALSE(check_eol(e, 5));
  CHECK(brute_force_eol(e) == 3);
  CHECK(all_eol_solutions(e) == std::vector<std::uint64_t>{3, 7, 8});
  CHECK_THROWS_AS(check_eol(e, 0), Error);
  CHECK_THROWS_AS(check_eol(e, 9), Error);
}

TEST_CASE("desk Iter instance") {
  const IterInstance it = desk_iter();
  CHECK(check_iter(it, 3));
  CHECK_FALSE(check_iter(it, 2));
  CHECK(all_iter_solutions(it) == std::vector<std::uint64_t>{3, 7});
  CHECK(all_iter_solutions(preprocess_iter(it)) == std::vector<std::uint64_t>{3, 7});
  CHECK_THROWS_AS(check_iter(it, 9), Error);
}

TEST_CASE("small brute-force cases") {
  CHECK(brute_force_eol(eol_from_edges(1, {{1, 2}})) == 2);
  // 1 -> 2 and 7 -> 8, so the sinks are 2 and 8 and 7 is a source
  CHECK(brute_force_eol(eol_from_edges(3, {{1, 2}, {7, 8}})) == 2);
  CHECK(all_eol_solutions(eol_from_edges(3, {{1, 2}, {7, 8}})) == std::vector<std::uint64_t>{2, 7, 8});
}

TEST_CASE("iter: C(u) < u is a solution") {
  // C(1)=3, C(3)=3, C(4)=2
  const IterInstance it = iter_table(2, {3, 2, 3, 2});
  CHECK(check_iter(it, 4));
  CHECK(check_iter(it, 1));  // C(1)=3 > 1 and C(3)=3
}

TEST_CASE("load-time conditions") {
  CHECK_THROWS_AS(eol_tables(1, {1, 2}, {1, 1}).validate(), Error);  // S(1)=1
  CHECK_THROWS_AS(eol_tables(1, {2, 2}, {2, 1}).validate(), Error);  // P(1)=2
  CHECK_NOTHROW(eol_tables(1, {2, 2}, {1, 1}).validate());
  CHECK_THROWS_AS(iter_table(1, {1, 2}).validate(), Error);
}

TEST_CASE("preprocess_eol") {
  // S(2)=5 but P(5)=7; P(3)=9 but S(9)=4
  std::vector<std::uint64_t> S(16), P(16);
  for (std::uint64_t v = 1; v <= 16; ++v) S[v - 1] = P[v - 1] = v;
  S[0] = 4;
  P[3] = 1;
  S[1] = 5;
  P[4] = 7;
  P[2] = 9;
  S[8] = 4;
  const EolInstance e = eol_tables(4, S, P);
  CHECK(preprocessed_succ(e, 2) == 2);
  CHECK(preprocessed_pred(e, 3) == 3);
  CHECK(preprocessed_succ(e, 1) == 4);
  const EolInstance pe = preprocess_eol(e);
  CHECK(pe.succ(2) == 2);
  CHECK(pe.pred(3) == 3);
  CHECK(pe.succ(1) == 4);
  for (std::uint64_t v = 1; v <= 16; ++v) {
    CHECK(pe.succ(v) == preprocessed_succ(e, v));
    CHECK(pe.pred(v) == preprocessed_pred(e, v));
  }
}

TEST_CASE("preprocess_eol keeps consistent instances") {
  const EolInstance e = desk_eol();
  const EolInstance pe = preprocess_eol(e);
  for (std::uint64_t v = 1; v <= 8; ++v) {
    CHECK(pe.succ(v) == e.succ(v));
    CHECK(pe.pred(v) == e.pred(v));
  }
}

TEST_CASE("preprocess_iter") {
  std::vector<std::uint64_t> C{2, 2, 3, 4, 3, 6, 7, 8};
  C[4] = 3;
  const IterInstance it = iter_table(3, C);
  CHECK(preprocessed_iter(it, 5) == 5);
  C[4] = 8;
  CHECK(preprocessed_iter(iter_table(3, C), 5) == 8);
  CHECK(preprocess_iter(iter_table(3, C)).map(5) == 8);
}

TEST_CASE("check_eol agrees with the definition on random tables") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 60; ++t) {
    const int n = 1 + t % 6;
    const std::uint64_t V = std::uint64_t{1} << n;
    std::vector<std::uint64_t> S(V), P(V);
    for (auto& v : S) v = 1 + rng() % V;
    for (auto& v : P) v = 1 + rng() % V;
    P[0] = 1;
    if (S[0] == 1) S[0] = 2;
    const EolInstance e = eol_tables(n, S, P);
    const auto want = eol_oracle(S, P);
    const auto got = all_eol_solutions(e);
    CHECK(std::set<std::uint64_t>(got.begin(), got.end()) == want);
    if (!want.empty()) CHECK(brute_force_eol(e) == *want.begin());
  }
}

TEST_CASE("preprocess_eol creates no new solutions") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + t % 5;
    const std::uint64_t V = std::uint64_t{1} << n;
    std::vector<std::uint64_t> S(V), P(V);
    for (auto& v : S) v = 1 + rng() % V;
    for (auto& v : P) v = 1 + rng() % V;
    P[0] = 1;
    if (S[0] == 1) S[0] = 2;
    const EolInstance e = eol_tables(n, S, P);
    const EolInstance pe = preprocess_eol(e);
    for (std::uint64_t v = 1; v <= V; ++v) {
      // S, P agree on every edge after preprocessing
      if (pe.succ(v) != v) CHECK(pe.pred(pe.succ(v)) == v);
      if (pe.pred(v) != v) CHECK(pe.succ(pe.pred(v)) == v);
      // a solution of the output maps to a solution of the input: v itself,
      // or the vertex whose edge into / out of v was cut
      if (check_eol(pe, v)) {
        const bool ok = check_eol(e, v) || check_eol(e, e.succ(v)) || check_eol(e, e.pred(v));
        CHECK(ok);
      }
    }
  }
}

TEST_CASE("preprocess_iter keeps totality") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 60; ++t) {
    const int m = 2 + t % 5;
    const std::uint64_t V = std::uint64_t{1} << m;
    std::vector<std::uint64_t> C(V);
    for (auto& v : C) v = 1 + rng() % V;
    if (C[0] == 1) C[0] = 2;
    const IterInstance p = preprocess_iter(iter_table(m, C));
    for (std::uint64_t u = 1; u <= V; ++u) CHECK(p.map(u) >= u);
    CHECK_NOTHROW(brute_force_iter(p));
    CHECK(check_iter(p, brute_force_iter(p)));
  }
}

TEST_CASE("brute force guard") {
  EolInstance e;
  e.n = 21;
  CHECK_THROWS_AS(brute_force_eol(e), Error);
}

TEST_CASE("check_kkt on a box") {
  const Rational eps = R("1/100");
  CHECK(check_kkt(box_kkt_instance({R("1/200"), R("-3/1000")}, eps), {R("1/2"), R("1/2")}).is_solution());
  CHECK(check_kkt(box_kkt_instance({R("1/2"), 0}, eps), {0, R("1/2")}).is_solution());
  CHECK_FALSE(check_kkt(box_kkt_instance({R("1/50"), 0}, eps), {R("1/2"), R("1/2")}).is_solution());
  CHECK_FALSE(check_kkt(box_kkt_instance({R("-1/2"), 0}, eps), {0, R("1/2")}).is_solution());
  CHECK(check_kkt(box_kkt_instance({R("-1/2"), 0}, eps), {1, R("1/2")}).is_solution());
  CHECK_THROWS_AS(check_kkt(box_kkt_instance({0, 0}, eps), {2, 0}), Error);
}

TEST_CASE("l2 eps-KKT implies linf eps-KKT on boxes") {
  std::mt19937_64 rng(53);
  const Box b = Box::unit(2);
  for (int i = 0; i < 2000; ++i) {
    Vec x = testutil::rand_vec(rng, 2, 0, 1, 3);
    const Vec g = testutil::rand_vec(rng, 2, -1, 1, 5);
    const Rational eps = testutil::rand_rat(rng, 0, 1, 4);
    if (box_kkt(b, x, g, eps, KktNorm::l2)) CHECK(box_kkt(b, x, g, eps, KktNorm::linf));
  }
}

TEST_CASE("check_kkt on a polytope with linf") {
  // D = {x in R^2 : x1 + x2 <= 1, -x1 <= 0, -x2 <= 0}
  KktInstance k = box_kkt_instance({-1, -1}, R("1/100"));
  k.domain.poly = Polytope{{{1, 1}, {-1, 0}, {0, -1}}, {1, 0, 0}};
  CHECK(check_kkt(k, {R("1/2"), R("1/2")}).is_solution());  // -grad is the face normal
  CHECK_FALSE(check_kkt(k, {R("1/4"), R("1/4")}).is_solution());
  CHECK_THROWS_AS(check_kkt(k, {R("1/2"), R("1/2")}, KktNorm::l2), Error);
  k.grad_f = testutil::constant(2, {-1, R("-1/2")});
  CHECK_FALSE(check_kkt(k, {R("1/2"), R("1/2")}).is_solution());
  CHECK(check_kkt(k, {1, 0}).is_solution());
}

TEST_CASE("check_gd") {
  GdInstance g;
  g.mode = GdMode::Fixpoint;
  g.eta = 1;
  g.eps = R("1/10");
  g.domain.box = Box::unit(1);
  g.f = testutil::identity(1);
  g.grad_f = testutil::constant(1, {1});
  g.L = 1;
  CHECK(check_gd(g, {0}).is_solution());
  CHECK_FALSE(check_gd(g, {R("7/10")}).is_solution());
  g.mode = GdMode::LocalSearch;
  g.f = testutil::constant(1, {3});
  CHECK(check_gd(g, {R("7/10")}).is_solution());
  CHECK_THROWS_AS(check_gd(g, {2}), Error);
}

TEST_CASE("check_taylor") {
  const ArithCircuit f = testutil::linear({2, -3}, 1);
  const ArithCircuit gf = testutil::constant(2, {2, -3});
  auto F = [&](const Vec& x) { return eval_arith(f, x)[0]; };
  auto G = [&](const Vec& x) { return eval_arith(gf, x); };
  std::mt19937_64 rng(59);
  for (int i = 0; i < 100; ++i)
    CHECK_FALSE(check_taylor(F, G, 0, testutil::rand_vec(rng, 2, 0, 1), testutil::rand_vec(rng, 2, 0, 1)).is_violation());
  auto step = [](const Vec& x) { return x[0] > R("1/2") ? Rational(1) : Rational(0); };
  auto zero = [](const Vec&) { return Vec{0, 0}; };
  const Verdict v = check_taylor(step, zero, 1, {R("1/2"), 0}, {R("51/100"), 0});
  CHECK(v.kind == VerdictKind::ViolationTaylor);
  CHECK(v.witness.size() == 2);
}

TEST_CASE("check_lipschitz") {
  const ArithCircuit k = testutil::constant(1, {5});
  const ArithCircuit id = testutil::identity(1);
  testutil::C b(1);
  const ArithCircuit m3 = b.out({b.mulc(3, b.in(0))});
  std::mt19937_64 rng(61);
  for (int i = 0; i < 50; ++i) {
    const Vec x = testutil::rand_vec(rng, 1, 0, 1), y = testutil::rand_vec(rng, 1, 0, 1);
    CHECK_FALSE(check_lipschitz(k, 0, x, y, KktNorm::l2).is_violation());
    CHECK_FALSE(check_lipschitz(id, 1, x, y, KktNorm::l2).is_violation());
    if (x != y) CHECK(check_lipschitz(m3, 2, x, y, KktNorm::linf).is_violation());
  }
}

TEST_CASE("check_gclo") {
  GcloInstance g;
  g.eps = R("1/2");
  g.domain.box = Box::unit(1);
  g.p = testutil::identity(1);
  g.g = testutil::linear({1}, -1);
  g.L = 1;
  CHECK_FALSE(check_gclo(g, {1}).is_solution());
  CHECK(check_gclo(g, {R("1/4")}).is_solution());
  g.g = testutil::identity(1);
  CHECK(check_gclo(g, {1}).is_solution());
  g.g = testutil::linear({1}, -1);
  g.p = testutil::constant(1, {2});
  CHECK(check_gclo(g, {1}).is_solution());
  CHECK_THROWS_AS(check_gclo(g, {-1}), Error);
}

TEST_CASE("lp_feasible") {
  // x + y <= 1, -x <= -2 has no solution with x, y free
  CHECK_FALSE(lp_feasible({{1, 1}, {-1, 0}, {0, -1}}, {1, -2, 0}, 2));
  CHECK(lp_feasible({{1, 1}, {-1, 0}}, {1, 0}, 2));
}
