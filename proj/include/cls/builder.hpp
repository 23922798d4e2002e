#pragma once

#include "cls/circuits.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace cls {

// Hash-consing arithmetic circuit builder with constant folding.
// Wires holding 0/1 values are called bits below.
class Builder {
 public:
  explicit Builder(int num_inputs);

  int input(int i);
  int constant(const Rational& c);
  int add(int a, int b);
  int sub(int a, int b);
  int mul(int a, int b);
  int mulc(const Rational& c, int a);
  int max(int a, int b);
  int min(int a, int b);
  int cmp(int a, int b);  // [a > b]

  bool is_const(int w) const;
  const Rational& const_value(int w) const;

  int sum(const std::vector<int>& ws);
  // linear combination sum_k coef[k] * w[k] + c0
  int lincomb(const std::vector<std::pair<Rational, int>>& terms, const Rational& c0 = 0);

  // bit logic, same gadgets as bool_to_arith
  int bnot(int a);
  int band(int a, int b);
  int bor(int a, int b);
  int band(const std::vector<int>& ws);
  int bor(const std::vector<int>& ws);

  // integer-valued comparisons
  int ge_const(int v, const Rational& c);  // [v >= c], v integer-valued, c integer
  int le_const(int v, const Rational& c);  // [v <= c]
  int in_range(int v, const Rational& lo, const Rational& hi);
  int eq_const(int v, const Rational& c);
  int lt(int a, int b);  // [a < b]
  int eq(int a, int b);  // integer-valued only

  // bit ? v : 0, requires |v| <= bound
  int select(int bit, int v, const Rational& bound);
  // bit ? a : b
  int mux(int bit, int a, int b, const Rational& bound);
  int clamp(int v, const Rational& lo, const Rational& hi);

  // Bits of floor(v) for v in [0, 2^k), most significant first in the
  // computation, returned little-endian.
  std::vector<int> floor_bits(int v, int k);
  int from_bits(const std::vector<int>& bits);

  std::vector<int> inline_circuit(const ArithCircuit& c, const std::vector<int>& in);
  std::vector<int> inline_bool(const BoolCircuit& b, const std::vector<int>& in);

  // Emits only gates reachable from the outputs.
  ArithCircuit finish(const std::vector<int>& outputs) const;

  std::size_t gate_count() const { return gates_.size(); }

 private:
  int push(Gate g);
  int num_inputs_;
  std::vector<Gate> gates_;
  std::unordered_map<std::string, int> memo_;
  int zero_, one_;
};

}  // namespace cls
