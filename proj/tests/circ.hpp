#pragma once

#include "cls/circuits.hpp"

namespace testutil {

// Small circuit builder for tests.
struct C {
  cls::ArithCircuit c;
  explicit C(int n) { c.num_inputs = n; }
  int add(cls::Op op, int a = -1, int b = -1, cls::Rational k = 0) {
    c.gates.push_back(cls::Gate{op, a, b, k});
    return static_cast<int>(c.gates.size()) - 1;
  }
  int in(int i) { return add(cls::Op::Input, i); }
  int k(const cls::Rational& v) { return add(cls::Op::Const, -1, -1, v); }
  int mulc(const cls::Rational& v, int a) { return add(cls::Op::MulC, a, -1, v); }
  int plus(int a, int b) { return add(cls::Op::Add, a, b); }
  int minus(int a, int b) { return add(cls::Op::Sub, a, b); }
  int mul(int a, int b) { return add(cls::Op::Mul, a, b); }
  cls::ArithCircuit out(std::vector<int> o) {
    c.outputs = std::move(o);
    return c;
  }
};

// n inputs, constant outputs.
inline cls::ArithCircuit constant(int n, const cls::Vec& v) {
  C b(n);
  std::vector<int> o;
  for (const auto& x : v) o.push_back(b.k(x));
  return b.out(o);
}

// n inputs, output = coefficient-weighted sum of the inputs.
inline cls::ArithCircuit linear(const cls::Vec& coeffs, const cls::Rational& c0 = 0) {
  C b(static_cast<int>(coeffs.size()));
  int acc = b.k(c0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) acc = b.plus(acc, b.mulc(coeffs[i], b.in(static_cast<int>(i))));
  return b.out({acc});
}

// identity map on n inputs
inline cls::ArithCircuit identity(int n) {
  C b(n);
  std::vector<int> o;
  for (int i = 0; i < n; ++i) o.push_back(b.in(i));
  return b.out(o);
}

}  // namespace testutil
