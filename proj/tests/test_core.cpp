#include "cls/core.hpp"
#include "util.hpp"

#include <doctest.h>

using namespace cls;
using testutil::R;

TEST_CASE("normalize") {
  CHECK(to_string(normalize(2, 4)) == "1/2");
  CHECK(to_string(normalize(3, -6)) == "-1/2");
  const Rational z = normalize(0, 7);
  CHECK(z.get_num() == 0);
  CHECK(z.get_den() == 1);
  CHECK_THROWS_AS(normalize(1, 0), Error);
  try {
    normalize(5, 0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroDenominator);
  }
}

TEST_CASE("normalize is idempotent and scale invariant") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> d(-100000, 100000);
  for (int i = 0; i < 500; ++i) {
    const Integer a = d(rng), b = d(rng) | 1, k = d(rng) | 1;
    const Rational r = normalize(a, b);
    CHECK(normalize(r.get_num(), r.get_den()) == r);
    CHECK(normalize(a * k, b * k) == r);
    CHECK(r.get_den() > 0);
    Integer g;
    mpz_gcd(g.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    CHECK(g == 1);
  }
}

TEST_CASE("rational text form") {
  CHECK(parse_rational("-6/4") == R("-3/2"));
  CHECK(to_string(parse_rational("+8/4")) == "2");
  CHECK(to_string(parse_rational("0/5")) == "0");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("1.5"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK_THROWS_AS(parse_rational("3/-4"), Error);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const Rational r = testutil::rand_rat(rng, -1000, 1000, 40);
    CHECK(parse_rational(to_string(r)) == r);
  }
  CHECK(parse_vec("1/2,-3,0") == Vec{R("1/2"), R("-3"), R("0")});
}

TEST_CASE("exact arithmetic") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const Rational a = testutil::rand_rat(rng, -50, 50, 30), b = testutil::rand_rat(rng, -50, 50, 30);
    CHECK((a + b) - b == a);
    if (b != 0) CHECK((a * b) / b == a);
  }
}

TEST_CASE("norms") {
  CHECK(norm({3, 4}, NormKind::l2sq) == 25);
  CHECK(norm({3, -4}, NormKind::linf) == 4);
  CHECK(norm({0, 0}, NormKind::l1) == 0);
  CHECK(norm({R("-1/2"), R("1/3")}, NormKind::l1) == R("5/6"));
}

TEST_CASE("project_box") {
  const Box u = Box::unit(2);
  CHECK(project_box({R("3/2"), R("-1/5")}, u) == Vec{1, 0});
  CHECK(project_box({R("3/10"), R("7/10")}, u) == Vec{R("3/10"), R("7/10")});
  CHECK(project_box({2, 2}, u) == Vec{1, 1});
  CHECK_THROWS_AS(project_box({1}, u), Error);
}

TEST_CASE("project_box is idempotent and 1-Lipschitz in linf") {
  std::mt19937_64 rng(9);
  const Box b = Box::cube(3, -1, 2);
  for (int i = 0; i < 500; ++i) {
    const Vec x = testutil::rand_vec(rng, 3, -5, 5), y = testutil::rand_vec(rng, 3, -5, 5);
    const Vec px = project_box(x, b);
    CHECK(b.contains(px));
    CHECK(project_box(px, b) == px);
    CHECK(norm(px - project_box(y, b), NormKind::linf) <= norm(x - y, NormKind::linf));
  }
}

TEST_CASE("round_to_denominator") {
  CHECK(round_to_denominator(R("1/3"), 4) == R("1/4"));
  CHECK(round_to_denominator(R("-5/8"), 4) == R("-1/2"));
  CHECK(round_to_denominator(R("7/2"), 1) == 4);
}

TEST_CASE("bit_size") {
  CHECK(bit_size(R("3/4")) == 5);
  CHECK(bit_size(Rational(0)) >= 1);
}
