#include "cls/builder.hpp"

namespace cls {

Builder::Builder(int num_inputs) : num_inputs_(num_inputs) {
  zero_ = constant(0);
  one_ = constant(1);
}

int Builder::push(Gate g) {
  std::string key;
  key.reserve(32);
  key += static_cast<char>('A' + static_cast<int>(g.op));
  key += std::to_string(g.a);
  key += ',';
  key += std::to_string(g.b);
  if (g.op == Op::Const || g.op == Op::MulC) {
    key += ',';
    key += g.c.get_str();
  }
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  gates_.push_back(std::move(g));
  int id = static_cast<int>(gates_.size()) - 1;
  memo_.emplace(std::move(key), id);
  return id;
}

bool Builder::is_const(int w) const { return gates_[w].op == Op::Const; }
const Rational& Builder::const_value(int w) const { return gates_[w].c; }

int Builder::input(int i) {
  if (i < 0 || i >= num_inputs_) throw Error(Errc::MalformedCircuit, "builder input index");
  return push(Gate{Op::Input, i, -1, 0});
}

int Builder::constant(const Rational& c) { return push(Gate{Op::Const, -1, -1, c}); }

int Builder::add(int a, int b) {
  if (is_const(a) && is_const(b)) return constant(const_value(a) + const_value(b));
  if (is_const(a) && const_value(a) == 0) return b;
  if (is_const(b) && const_value(b) == 0) return a;
  if (a > b) std::swap(a, b);
  return push(Gate{Op::Add, a, b, 0});
}

int Builder::sub(int a, int b) {
  if (is_const(a) && is_const(b)) return constant(const_value(a) - const_value(b));
  if (is_const(b) && const_value(b) == 0) return a;
  if (a == b) return zero_;
  return push(Gate{Op::Sub, a, b, 0});
}

int Builder::mul(int a, int b) {
  if (is_const(a)) return mulc(const_value(a), b);
  if (is_const(b)) return mulc(const_value(b), a);
  if (a > b) std::swap(a, b);
  return push(Gate{Op::Mul, a, b, 0});
}

int Builder::mulc(const Rational& c, int a) {
  if (c == 0) return zero_;
  if (c == 1) return a;
  if (is_const(a)) return constant(c * const_value(a));
  return push(Gate{Op::MulC, a, -1, c});
}

int Builder::max(int a, int b) {
  if (is_const(a) && is_const(b)) return constant(const_value(a) >= const_value(b) ? const_value(a) : const_value(b));
  if (a == b) return a;
  if (a > b) std::swap(a, b);
  return push(Gate{Op::Max, a, b, 0});
}

int Builder::min(int a, int b) {
  if (is_const(a) && is_const(b)) return constant(const_value(a) <= const_value(b) ? const_value(a) : const_value(b));
  if (a == b) return a;
  if (a > b) std::swap(a, b);
  return push(Gate{Op::Min, a, b, 0});
}

int Builder::cmp(int a, int b) {
  if (is_const(a) && is_const(b)) return const_value(a) > const_value(b) ? one_ : zero_;
  if (a == b) return zero_;
  return push(Gate{Op::Cmp, a, b, 0});
}

int Builder::sum(const std::vector<int>& ws) {
  int acc = zero_;
  for (int w : ws) acc = add(acc, w);
  return acc;
}

int Builder::lincomb(const std::vector<std::pair<Rational, int>>& terms, const Rational& c0) {
  int acc = constant(c0);
  for (auto& [c, w] : terms) acc = add(acc, mulc(c, w));
  return acc;
}

int Builder::bnot(int a) { return sub(one_, a); }

int Builder::bor(int a, int b) {
  if (is_const(a)) return const_value(a) == 0 ? b : one_;
  if (is_const(b)) return const_value(b) == 0 ? a : one_;
  if (a == b) return a;
  return min(one_, add(a, b));
}

int Builder::band(int a, int b) {
  if (is_const(a)) return const_value(a) == 0 ? zero_ : b;
  if (is_const(b)) return const_value(b) == 0 ? zero_ : a;
  if (a == b) return a;
  return max(zero_, sub(add(a, b), one_));
}

int Builder::band(const std::vector<int>& ws) {
  int acc = one_;
  for (int w : ws) acc = band(acc, w);
  return acc;
}

int Builder::bor(const std::vector<int>& ws) {
  int acc = zero_;
  for (int w : ws) acc = bor(acc, w);
  return acc;
}

int Builder::ge_const(int v, const Rational& c) { return cmp(v, constant(c - Rational(1, 2))); }
int Builder::le_const(int v, const Rational& c) { return cmp(constant(c + Rational(1, 2)), v); }

int Builder::in_range(int v, const Rational& lo, const Rational& hi) {
  if (lo > hi) return zero_;
  return band(ge_const(v, lo), le_const(v, hi));
}

int Builder::eq_const(int v, const Rational& c) { return in_range(v, c, c); }

int Builder::lt(int a, int b) { return cmp(b, a); }

int Builder::eq(int a, int b) { return sub(sub(one_, cmp(a, b)), cmp(b, a)); }

int Builder::select(int bit, int v, const Rational& bound) {
  if (is_const(bit)) return const_value(bit) == 0 ? zero_ : v;
  if (is_const(v)) return mulc(const_value(v), bit);
  int hi = mulc(bound, bit);
  int lo = mulc(-bound, bit);
  return max(min(v, hi), lo);
}

int Builder::mux(int bit, int a, int b, const Rational& bound) {
  // b + bit * (a - b)
  return add(b, select(bit, sub(a, b), 2 * bound));
}

int Builder::clamp(int v, const Rational& lo, const Rational& hi) {
  return min(max(v, constant(lo)), constant(hi));
}

std::vector<int> Builder::floor_bits(int v, int k) {
  std::vector<int> bits(k);
  int r = v;
  for (int i = k - 1; i >= 0; --i) {
    Rational p = pow2(i);
    int b = bnot(cmp(constant(p), r));  // [r >= 2^i]
    bits[i] = b;
    r = sub(r, mulc(p, b));
  }
  return bits;
}

int Builder::from_bits(const std::vector<int>& bits) {
  std::vector<std::pair<Rational, int>> t;
  for (std::size_t i = 0; i < bits.size(); ++i) t.emplace_back(pow2(static_cast<long>(i)), bits[i]);
  return lincomb(t);
}

std::vector<int> Builder::inline_circuit(const ArithCircuit& c, const std::vector<int>& in) {
  if (static_cast<int>(in.size()) != c.num_inputs) throw Error(Errc::DimensionMismatch, "inline_circuit");
  std::vector<int> map(c.gates.size());
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    switch (g.op) {
      case Op::Input: map[i] = in[g.a]; break;
      case Op::Const: map[i] = constant(g.c); break;
      case Op::Add: map[i] = add(map[g.a], map[g.b]); break;
      case Op::Sub: map[i] = sub(map[g.a], map[g.b]); break;
      case Op::Mul: map[i] = mul(map[g.a], map[g.b]); break;
      case Op::MulC: map[i] = mulc(g.c, map[g.a]); break;
      case Op::Max: map[i] = max(map[g.a], map[g.b]); break;
      case Op::Min: map[i] = min(map[g.a], map[g.b]); break;
      case Op::Cmp: map[i] = cmp(map[g.a], map[g.b]); break;
    }
  }
  std::vector<int> out;
  for (int o : c.outputs) out.push_back(map[o]);
  return out;
}

std::vector<int> Builder::inline_bool(const BoolCircuit& b, const std::vector<int>& in) {
  if (static_cast<int>(in.size()) != b.num_inputs) throw Error(Errc::DimensionMismatch, "inline_bool");
  std::vector<int> map(b.gates.size());
  for (std::size_t i = 0; i < b.gates.size(); ++i) {
    const BGate& g = b.gates[i];
    switch (g.op) {
      case BOp::Input: map[i] = in[g.a]; break;
      case BOp::Not: map[i] = bnot(map[g.a]); break;
      case BOp::And: map[i] = band(map[g.a], map[g.b]); break;
      case BOp::Or: map[i] = bor(map[g.a], map[g.b]); break;
    }
  }
  std::vector<int> out;
  for (int o : b.outputs) out.push_back(map[o]);
  return out;
}

ArithCircuit Builder::finish(const std::vector<int>& outputs) const {
  std::vector<char> live(gates_.size(), 0);
  for (int o : outputs) live[o] = 1;
  for (int i = static_cast<int>(gates_.size()) - 1; i >= 0; --i) {
    if (!live[i]) continue;
    const Gate& g = gates_[i];
    if (g.op == Op::Input || g.op == Op::Const) continue;
    live[g.a] = 1;
    if (g.op != Op::MulC) live[g.b] = 1;
  }
  ArithCircuit c;
  c.num_inputs = num_inputs_;
  std::vector<int> remap(gates_.size(), -1);
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    if (!live[i]) continue;
    Gate g = gates_[i];
    if (g.op != Op::Input && g.op != Op::Const) {
      g.a = remap[g.a];
      if (g.op != Op::MulC) g.b = remap[g.b];
    }
    remap[i] = static_cast<int>(c.gates.size());
    c.gates.push_back(std::move(g));
  }
  for (int o : outputs) c.outputs.push_back(remap[o]);
  return c;
}

}  // namespace cls
