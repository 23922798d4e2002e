#pragma once

#include "cls/core.hpp"

#include <random>

namespace testutil {

inline cls::Rational rand_rat(std::mt19937_64& rng, long lo, long hi, int den_bits = 12) {
  std::uniform_int_distribution<long> d(1, (1L << den_bits) - 1);
  const long den = d(rng);
  std::uniform_int_distribution<long> n(lo * den, hi * den);
  return cls::normalize(cls::Integer(n(rng)), cls::Integer(den));
}

inline cls::Vec rand_vec(std::mt19937_64& rng, std::size_t n, long lo, long hi, int den_bits = 12) {
  cls::Vec v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(rand_rat(rng, lo, hi, den_bits));
  return v;
}

inline cls::Rational R(const char* s) { return cls::parse_rational(s); }

}  // namespace testutil
