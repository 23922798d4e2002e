#include "cls/core.hpp"

#include <sstream>

namespace cls {

const char* errc_name(Errc e) {
  switch (e) {
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::ParseError: return "ParseError";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::MalformedCircuit: return "MalformedCircuit";
    case Errc::TableSizeMismatch: return "TableSizeMismatch";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::GuardExceeded: return "GuardExceeded";
    case Errc::PointOutsideDomain: return "PointOutsideDomain";
    case Errc::UnsupportedNormForPolytope: return "UnsupportedNormForPolytope";
    case Errc::StartOutsideDomain: return "StartOutsideDomain";
    case Errc::DimensionNotOne: return "DimensionNotOne";
    case Errc::DomainNotUnitSquare: return "DomainNotUnitSquare";
    case Errc::EvenCount: return "EvenCount";
    case Errc::IllBehavedInput: return "IllBehavedInput";
    case Errc::NoWitness: return "NoWitness";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::WindowTooLarge: return "WindowTooLarge";
    case Errc::InvalidInstance: return "InvalidInstance";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

Rational normalize(const Integer& num, const Integer& den) {
  if (den == 0) throw Error(Errc::ZeroDenominator, "denominator is zero");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

static bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

Rational parse_rational(std::string_view s) {
  std::string_view body = s;
  bool neg = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    neg = body[0] == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view ns = body.substr(0, slash);
  std::string_view ds = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!all_digits(ns) || !all_digits(ds))
    throw Error(Errc::ParseError, "bad rational '" + std::string(s) + "'");
  Integer num{std::string(ns)}, den{std::string(ds)};
  if (neg) num = -num;
  return normalize(num, den);
}

std::string to_string(const Rational& r) { return r.get_str(); }

std::size_t bit_size(const Rational& r) {
  return mpz_sizeinbase(r.get_num_mpz_t(), 2) + mpz_sizeinbase(r.get_den_mpz_t(), 2);
}

Integer floor_rat(const Rational& r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Integer ceil_rat(const Rational& r) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Rational pow2(long k) {
  Integer one = 1;
  Integer p;
  mpz_mul_2exp(p.get_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(k < 0 ? -k : k));
  return k < 0 ? Rational(Integer(1), p) : Rational(p);
}

Rational abs_rat(const Rational& r) { return r < 0 ? Rational(-r) : r; }

std::size_t bit_size(const Vec& v) {
  std::size_t s = 0;
  for (auto& x : v) s += bit_size(x);
  return s;
}

std::string to_string(const Vec& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += to_string(v[i]);
  }
  return out;
}

Vec parse_vec(std::string_view s) {
  Vec v;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    auto part = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    v.push_back(parse_rational(part));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return v;
}

bool Box::contains(const Vec& x) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

Box Box::unit(std::size_t n) { return cube(n, 0, 1); }

Box Box::cube(std::size_t n, const Rational& lo, const Rational& hi) {
  return Box{Vec(n, lo), Vec(n, hi)};
}

Rational norm(const Vec& v, NormKind kind) {
  Rational acc = 0;
  for (auto& x : v) {
    switch (kind) {
      case NormKind::l2sq: acc += x * x; break;
      case NormKind::linf: if (abs_rat(x) > acc) acc = abs_rat(x); break;
      case NormKind::l1: acc += abs_rat(x); break;
    }
  }
  return acc;
}

Vec project_box(const Vec& x, const Box& b) {
  if (x.size() != b.dim()) throw Error(Errc::DimensionMismatch, "project_box");
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Rational& v = x[i];
    out[i] = v < b.lo[i] ? b.lo[i] : (v > b.hi[i] ? b.hi[i] : v);
  }
  return out;
}

Vec operator+(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "vector add");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec operator-(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "vector sub");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec operator*(const Rational& s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

Rational dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "dot");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rational round_to_denominator(const Rational& r, const Integer& den) {
  Rational scaled = r * den + Rational(1, 2);
  return normalize(floor_rat(scaled), den);
}

}  // namespace cls
