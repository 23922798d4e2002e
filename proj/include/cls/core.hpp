#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cls {

enum class Errc {
  ZeroDenominator,
  ParseError,
  DimensionMismatch,
  MalformedCircuit,
  TableSizeMismatch,
  OutOfRange,
  GuardExceeded,
  PointOutsideDomain,
  UnsupportedNormForPolytope,
  StartOutsideDomain,
  DimensionNotOne,
  DomainNotUnitSquare,
  EvenCount,
  IllBehavedInput,
  NoWitness,
  BudgetExceeded,
  WindowTooLarge,
  InvalidInstance,
  IoError,
};

const char* errc_name(Errc e);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// mpq_class keeps values canonical as long as every constructor path goes
// through normalize() or parse_rational().
using Rational = mpq_class;
using Integer = mpz_class;

Rational normalize(const Integer& num, const Integer& den);
Rational parse_rational(std::string_view s);
std::string to_string(const Rational& r);
// bits of numerator plus bits of denominator
std::size_t bit_size(const Rational& r);

Integer floor_rat(const Rational& r);
Integer ceil_rat(const Rational& r);
Rational pow2(long k);
Rational abs_rat(const Rational& r);

using Vec = std::vector<Rational>;

std::size_t bit_size(const Vec& v);
std::string to_string(const Vec& v);
Vec parse_vec(std::string_view s);  // comma separated

struct Box {
  Vec lo, hi;
  std::size_t dim() const { return lo.size(); }
  bool contains(const Vec& x) const;
  static Box unit(std::size_t n);
  static Box cube(std::size_t n, const Rational& lo, const Rational& hi);
  bool operator==(const Box&) const = default;
};

enum class NormKind { l2sq, linf, l1 };

Rational norm(const Vec& v, NormKind kind);
Vec project_box(const Vec& x, const Box& b);

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(const Rational& s, const Vec& a);
Rational dot(const Vec& a, const Vec& b);

// Round to the nearest rational with denominator dividing `den`.
Rational round_to_denominator(const Rational& r, const Integer& den);

}  // namespace cls
