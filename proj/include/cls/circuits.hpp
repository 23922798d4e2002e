#pragma once

#include "cls/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cls {

enum class Op : std::uint8_t { Input, Const, Add, Sub, Mul, MulC, Max, Min, Cmp };

const char* op_keyword(Op op);

struct Gate {
  Op op = Op::Const;
  int a = -1;  // operand, or input index for Input
  int b = -1;
  Rational c;  // Const value / MulC factor
};

struct ArithCircuit {
  int num_inputs = 0;
  std::vector<Gate> gates;
  std::vector<int> outputs;

  // throws MalformedCircuit
  void validate() const;
  bool is_linear() const;  // no Mul, no Cmp
};

// Restricted circuit: only Input, Const, Add, Sub, MulC, Max, Min.
class LinearCircuit {
 public:
  LinearCircuit() = default;
  explicit LinearCircuit(ArithCircuit c);
  const ArithCircuit& circuit() const { return c_; }

 private:
  ArithCircuit c_;
};

enum class BOp : std::uint8_t { Input, And, Or, Not };

struct BGate {
  BOp op = BOp::Input;
  int a = -1;
  int b = -1;
};

struct BoolCircuit {
  int num_inputs = 0;
  std::vector<BGate> gates;
  std::vector<int> outputs;
  void validate() const;
};

using Bits = std::vector<std::uint8_t>;

struct EvalTrace {
  std::vector<Rational> values;
};

Vec eval_arith(const ArithCircuit& c, const Vec& x, EvalTrace* trace = nullptr);
Vec eval_linear(const LinearCircuit& c, const Vec& x);
Bits eval_bool(const BoolCircuit& b, const Bits& bits);

// text format
std::string serialize(const ArithCircuit& c);
std::string serialize(const BoolCircuit& c);
ArithCircuit parse_arith(const std::string& text);
BoolCircuit parse_bool(const std::string& text);

std::size_t circuit_size(const ArithCircuit& c);
std::size_t circuit_size(const BoolCircuit& c);
int true_mul_depth(const ArithCircuit& c);
bool is_well_behaved(const ArithCircuit& c);
std::size_t audit_value_sizes(const ArithCircuit& c, const Vec& x);
Rational linear_lipschitz_bound(const LinearCircuit& c);

// Appends a simulation of `b` to `target`, reading inputs from `in` (0/1
// valued gates of target).  Returns the gate indices of b's outputs.
std::vector<int> bool_to_arith(const BoolCircuit& b, ArithCircuit& target, const std::vector<int>& in);
// Standalone version: inputs of the result are the Boolean inputs.
ArithCircuit bool_to_arith(const BoolCircuit& b);

// Multiplexer tree over little-endian input bits.
BoolCircuit table_to_bool(const std::vector<std::uint64_t>& table, int in_bits, int out_bits);

Bits to_bits(std::uint64_t v, int width);
std::uint64_t from_bits(const Bits& b);

}  // namespace cls
