#include "cls/circuits.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace cls {

const char* op_keyword(Op op) {
  switch (op) {
    case Op::Input: return "INPUT";
    case Op::Const: return "CONST";
    case Op::Add: return "ADD";
    case Op::Sub: return "SUB";
    case Op::Mul: return "MUL";
    case Op::MulC: return "MULC";
    case Op::Max: return "MAX";
    case Op::Min: return "MIN";
    case Op::Cmp: return "CMP";
  }
  return "?";
}

static int arity(Op op) {
  switch (op) {
    case Op::Input:
    case Op::Const: return 0;
    case Op::MulC: return 1;
    default: return 2;
  }
}

void ArithCircuit::validate() const {
  if (num_inputs < 0) throw Error(Errc::MalformedCircuit, "negative input count");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    int k = arity(g.op);
    if (g.op == Op::Input && (g.a < 0 || g.a >= num_inputs))
      throw Error(Errc::MalformedCircuit, "input index out of range at g" + std::to_string(i));
    if (k >= 1 && (g.a < 0 || g.a >= static_cast<int>(i)))
      throw Error(Errc::MalformedCircuit, "operand does not precede g" + std::to_string(i));
    if (k == 2 && (g.b < 0 || g.b >= static_cast<int>(i)))
      throw Error(Errc::MalformedCircuit, "operand does not precede g" + std::to_string(i));
  }
  if (outputs.empty()) throw Error(Errc::MalformedCircuit, "no outputs");
  for (int o : outputs)
    if (o < 0 || o >= static_cast<int>(gates.size())) throw Error(Errc::MalformedCircuit, "bad output");
}

bool ArithCircuit::is_linear() const {
  return std::none_of(gates.begin(), gates.end(),
                      [](const Gate& g) { return g.op == Op::Mul || g.op == Op::Cmp; });
}

LinearCircuit::LinearCircuit(ArithCircuit c) : c_(std::move(c)) {
  c_.validate();
  if (!c_.is_linear()) throw Error(Errc::MalformedCircuit, "linear circuit contains MUL or CMP");
}

void BoolCircuit::validate() const {
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const BGate& g = gates[i];
    int n = static_cast<int>(i);
    switch (g.op) {
      case BOp::Input:
        if (g.a < 0 || g.a >= num_inputs) throw Error(Errc::MalformedCircuit, "bool input index");
        break;
      case BOp::Not:
        if (g.a < 0 || g.a >= n) throw Error(Errc::MalformedCircuit, "bool operand");
        break;
      default:
        if (g.a < 0 || g.a >= n || g.b < 0 || g.b >= n) throw Error(Errc::MalformedCircuit, "bool operand");
    }
  }
  if (outputs.empty()) throw Error(Errc::MalformedCircuit, "no outputs");
  for (int o : outputs)
    if (o < 0 || o >= static_cast<int>(gates.size())) throw Error(Errc::MalformedCircuit, "bad output");
}

Vec eval_arith(const ArithCircuit& c, const Vec& x, EvalTrace* trace) {
  if (static_cast<int>(x.size()) != c.num_inputs)
    throw Error(Errc::DimensionMismatch, "eval_arith input count");
  std::vector<Rational> v(c.gates.size());
  const int n = static_cast<int>(c.gates.size());
  for (int i = 0; i < n; ++i) {
    const Gate& g = c.gates[i];
    if (arity(g.op) >= 1 && (g.a < 0 || g.a >= i)) throw Error(Errc::MalformedCircuit, "operand");
    if (arity(g.op) == 2 && (g.b < 0 || g.b >= i)) throw Error(Errc::MalformedCircuit, "operand");
    switch (g.op) {
      case Op::Input:
        if (g.a < 0 || g.a >= c.num_inputs) throw Error(Errc::MalformedCircuit, "input index");
        v[i] = x[g.a];
        break;
      case Op::Const: v[i] = g.c; break;
      case Op::Add: v[i] = v[g.a] + v[g.b]; break;
      case Op::Sub: v[i] = v[g.a] - v[g.b]; break;
      case Op::Mul: v[i] = v[g.a] * v[g.b]; break;
      case Op::MulC: v[i] = g.c * v[g.a]; break;
      case Op::Max: v[i] = v[g.a] >= v[g.b] ? v[g.a] : v[g.b]; break;
      case Op::Min: v[i] = v[g.a] <= v[g.b] ? v[g.a] : v[g.b]; break;
      case Op::Cmp: v[i] = v[g.a] > v[g.b] ? 1 : 0; break;
    }
  }
  Vec out;
  out.reserve(c.outputs.size());
  for (int o : c.outputs) {
    if (o < 0 || o >= n) throw Error(Errc::MalformedCircuit, "bad output");
    out.push_back(v[o]);
  }
  if (trace) trace->values = std::move(v);
  return out;
}

Vec eval_linear(const LinearCircuit& c, const Vec& x) { return eval_arith(c.circuit(), x); }

Bits eval_bool(const BoolCircuit& b, const Bits& bits) {
  if (static_cast<int>(bits.size()) != b.num_inputs) throw Error(Errc::DimensionMismatch, "eval_bool");
  b.validate();
  std::vector<std::uint8_t> v(b.gates.size());
  for (std::size_t i = 0; i < b.gates.size(); ++i) {
    const BGate& g = b.gates[i];
    switch (g.op) {
      case BOp::Input: v[i] = bits[g.a] ? 1 : 0; break;
      case BOp::And: v[i] = v[g.a] & v[g.b]; break;
      case BOp::Or: v[i] = v[g.a] | v[g.b]; break;
      case BOp::Not: v[i] = v[g.a] ^ 1; break;
    }
  }
  Bits out;
  for (int o : b.outputs) out.push_back(v[o]);
  return out;
}

std::string serialize(const ArithCircuit& c) {
  std::ostringstream os;
  os << "arith " << c.num_inputs << ' ' << c.gates.size() << ' ' << c.outputs.size() << '\n';
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    os << 'g' << i << " = " << op_keyword(g.op);
    switch (g.op) {
      case Op::Input: os << ' ' << g.a; break;
      case Op::Const: os << ' ' << to_string(g.c); break;
      case Op::MulC: os << ' ' << to_string(g.c) << " g" << g.a; break;
      default: os << " g" << g.a << " g" << g.b;
    }
    os << '\n';
  }
  for (int o : c.outputs) os << "out g" << o << '\n';
  return os.str();
}

std::string serialize(const BoolCircuit& c) {
  std::ostringstream os;
  os << "bool " << c.num_inputs << ' ' << c.gates.size() << ' ' << c.outputs.size() << '\n';
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const BGate& g = c.gates[i];
    os << 'g' << i << " = ";
    switch (g.op) {
      case BOp::Input: os << "INPUT " << g.a; break;
      case BOp::And: os << "AND g" << g.a << " g" << g.b; break;
      case BOp::Or: os << "OR g" << g.a << " g" << g.b; break;
      case BOp::Not: os << "NOT g" << g.a; break;
    }
    os << '\n';
  }
  for (int o : c.outputs) os << "out g" << o << '\n';
  return os.str();
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> t;
  std::string w;
  while (is >> w) t.push_back(w);
  return t;
}

int parse_ref(const std::string& s) {
  if (s.size() < 2 || s[0] != 'g') throw Error(Errc::ParseError, "bad gate reference '" + s + "'");
  try {
    return std::stoi(s.substr(1));
  } catch (...) {
    throw Error(Errc::ParseError, "bad gate reference '" + s + "'");
  }
}

int parse_int(const std::string& s) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw 0;
    return v;
  } catch (...) {
    throw Error(Errc::ParseError, "bad integer '" + s + "'");
  }
}

struct Header {
  int inputs, gates, outputs;
};

template <class Fn>
Header parse_lines(const std::string& text, const char* kind, Fn&& on_gate, std::vector<int>& outputs) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::ParseError, "empty circuit");
  auto h = split_ws(line);
  if (h.size() != 4 || h[0] != kind) throw Error(Errc::ParseError, std::string("expected '") + kind + "' header");
  Header hd{parse_int(h[1]), parse_int(h[2]), parse_int(h[3])};
  int seen = 0;
  while (std::getline(is, line)) {
    auto t = split_ws(line);
    if (t.empty()) continue;
    if (t[0] == "out") {
      if (t.size() != 2) throw Error(Errc::ParseError, "bad out line");
      outputs.push_back(parse_ref(t[1]));
      continue;
    }
    if (t.size() < 3 || t[1] != "=") throw Error(Errc::ParseError, "bad gate line '" + line + "'");
    if (parse_ref(t[0]) != seen) throw Error(Errc::ParseError, "gates must be numbered consecutively");
    on_gate(t);
    ++seen;
  }
  if (seen != hd.gates || static_cast<int>(outputs.size()) != hd.outputs)
    throw Error(Errc::ParseError, "header counts do not match body");
  return hd;
}

}  // namespace

ArithCircuit parse_arith(const std::string& text) {
  ArithCircuit c;
  auto on_gate = [&](const std::vector<std::string>& t) {
    Gate g;
    const std::string& kw = t[2];
    auto need = [&](std::size_t n) {
      if (t.size() != n) throw Error(Errc::ParseError, "wrong operand count for " + kw);
    };
    if (kw == "INPUT") { need(4); g.op = Op::Input; g.a = parse_int(t[3]); }
    else if (kw == "CONST") { need(4); g.op = Op::Const; g.c = parse_rational(t[3]); }
    else if (kw == "MULC") { need(5); g.op = Op::MulC; g.c = parse_rational(t[3]); g.a = parse_ref(t[4]); }
    else {
      need(5);
      g.a = parse_ref(t[3]);
      g.b = parse_ref(t[4]);
      if (kw == "ADD") g.op = Op::Add;
      else if (kw == "SUB") g.op = Op::Sub;
      else if (kw == "MUL") g.op = Op::Mul;
      else if (kw == "MAX") g.op = Op::Max;
      else if (kw == "MIN") g.op = Op::Min;
      else if (kw == "CMP") g.op = Op::Cmp;
      else throw Error(Errc::ParseError, "unknown gate keyword " + kw);
    }
    c.gates.push_back(std::move(g));
  };
  Header h = parse_lines(text, "arith", on_gate, c.outputs);
  c.num_inputs = h.inputs;
  c.validate();
  return c;
}

BoolCircuit parse_bool(const std::string& text) {
  BoolCircuit c;
  auto on_gate = [&](const std::vector<std::string>& t) {
    BGate g;
    const std::string& kw = t[2];
    if (kw == "INPUT" && t.size() == 4) { g.op = BOp::Input; g.a = parse_int(t[3]); }
    else if (kw == "NOT" && t.size() == 4) { g.op = BOp::Not; g.a = parse_ref(t[3]); }
    else if ((kw == "AND" || kw == "OR") && t.size() == 5) {
      g.op = kw == "AND" ? BOp::And : BOp::Or;
      g.a = parse_ref(t[3]);
      g.b = parse_ref(t[4]);
    } else {
      throw Error(Errc::ParseError, "bad bool gate line");
    }
    c.gates.push_back(g);
  };
  Header h = parse_lines(text, "bool", on_gate, c.outputs);
  c.num_inputs = h.inputs;
  c.validate();
  return c;
}

std::size_t circuit_size(const ArithCircuit& c) { return serialize(c).size() * 8; }
std::size_t circuit_size(const BoolCircuit& c) { return serialize(c).size() * 8; }

int true_mul_depth(const ArithCircuit& c) {
  const std::size_t n = c.gates.size();
  std::vector<char> is_const(n, 0);
  std::vector<int> depth(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Gate& g = c.gates[i];
    switch (g.op) {
      case Op::Input: break;
      case Op::Const: is_const[i] = 1; break;
      case Op::MulC:
        is_const[i] = is_const[g.a];
        depth[i] = depth[g.a];
        break;
      default: {
        is_const[i] = is_const[g.a] && is_const[g.b];
        int d = std::max(depth[g.a], depth[g.b]);
        if (g.op == Op::Mul && !is_const[g.a] && !is_const[g.b]) ++d;
        depth[i] = d;
      }
    }
  }
  int best = 0;
  for (int o : c.outputs) best = std::max(best, depth[o]);
  return best;
}

static int floor_log2(std::size_t v) {
  int k = -1;
  while (v) {
    v >>= 1;
    ++k;
  }
  return k;
}

bool is_well_behaved(const ArithCircuit& c) {
  return true_mul_depth(c) <= floor_log2(circuit_size(c));
}

std::size_t audit_value_sizes(const ArithCircuit& c, const Vec& x) {
  EvalTrace tr;
  eval_arith(c, x, &tr);
  std::size_t best = 0;
  for (auto& v : tr.values) best = std::max(best, bit_size(v));
  return best;
}

Rational linear_lipschitz_bound(const LinearCircuit& lc) {
  const ArithCircuit& c = lc.circuit();
  std::vector<Rational> L(c.gates.size());
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    switch (g.op) {
      case Op::Input: L[i] = 1; break;
      case Op::Const: L[i] = 0; break;
      case Op::Add:
      case Op::Sub: L[i] = L[g.a] + L[g.b]; break;
      case Op::Max:
      case Op::Min: L[i] = L[g.a] >= L[g.b] ? L[g.a] : L[g.b]; break;
      case Op::MulC: L[i] = abs_rat(g.c) * L[g.a]; break;
      default: throw Error(Errc::MalformedCircuit, "non-linear gate in linear circuit");
    }
  }
  Rational best = 0;
  for (int o : c.outputs)
    if (L[o] > best) best = L[o];
  return best;
}

std::vector<int> bool_to_arith(const BoolCircuit& b, ArithCircuit& t, const std::vector<int>& in) {
  if (static_cast<int>(in.size()) != b.num_inputs) throw Error(Errc::DimensionMismatch, "bool_to_arith inputs");
  auto push = [&](Gate g) {
    t.gates.push_back(std::move(g));
    return static_cast<int>(t.gates.size()) - 1;
  };
  int zero = push(Gate{Op::Const, -1, -1, 0});
  int one = push(Gate{Op::Const, -1, -1, 1});
  std::vector<int> map(b.gates.size());
  for (std::size_t i = 0; i < b.gates.size(); ++i) {
    const BGate& g = b.gates[i];
    switch (g.op) {
      case BOp::Input: map[i] = in[g.a]; break;
      case BOp::Not: map[i] = push(Gate{Op::Sub, one, map[g.a], 0}); break;
      case BOp::Or: {
        int s = push(Gate{Op::Add, map[g.a], map[g.b], 0});
        map[i] = push(Gate{Op::Min, one, s, 0});
        break;
      }
      case BOp::And: {
        int s = push(Gate{Op::Add, map[g.a], map[g.b], 0});
        int d = push(Gate{Op::Sub, s, one, 0});
        map[i] = push(Gate{Op::Max, zero, d, 0});
        break;
      }
    }
  }
  std::vector<int> outs;
  for (int o : b.outputs) outs.push_back(map[o]);
  return outs;
}

ArithCircuit bool_to_arith(const BoolCircuit& b) {
  ArithCircuit c;
  c.num_inputs = b.num_inputs;
  std::vector<int> in;
  for (int i = 0; i < b.num_inputs; ++i) {
    c.gates.push_back(Gate{Op::Input, i, -1, 0});
    in.push_back(i);
  }
  c.outputs = bool_to_arith(b, c, in);
  return c;
}

BoolCircuit table_to_bool(const std::vector<std::uint64_t>& table, int in_bits, int out_bits) {
  if (in_bits < 1 || in_bits > 24 || out_bits < 1 || out_bits > 63)
    throw Error(Errc::TableSizeMismatch, "unsupported bit widths");
  if (table.size() != (std::size_t{1} << in_bits)) throw Error(Errc::TableSizeMismatch, "table length");
  for (auto v : table)
    if (v >> out_bits) throw Error(Errc::TableSizeMismatch, "entry exceeds out_bits");

  BoolCircuit c;
  c.num_inputs = in_bits;
  auto push = [&](BGate g) {
    c.gates.push_back(g);
    return static_cast<int>(c.gates.size()) - 1;
  };
  std::vector<int> x(in_bits), nx(in_bits);
  for (int i = 0; i < in_bits; ++i) x[i] = push(BGate{BOp::Input, i, -1});
  for (int i = 0; i < in_bits; ++i) nx[i] = push(BGate{BOp::Not, x[i], -1});
  const int zero = push(BGate{BOp::And, x[0], nx[0]});
  const int one = push(BGate{BOp::Not, zero, -1});

  std::map<std::tuple<int, int, int>, int> memo;
  auto mux = [&](int level, int hi, int lo) {
    if (hi == lo) return hi;
    if (hi == one && lo == zero) return x[level];
    if (hi == zero && lo == one) return nx[level];
    auto key = std::make_tuple(level, hi, lo);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int r;
    if (lo == zero) r = push(BGate{BOp::And, x[level], hi});
    else if (hi == zero) r = push(BGate{BOp::And, nx[level], lo});
    else if (hi == one) r = push(BGate{BOp::Or, x[level], lo});
    else if (lo == one) r = push(BGate{BOp::Or, nx[level], hi});
    else {
      int h = push(BGate{BOp::And, x[level], hi});
      int l = push(BGate{BOp::And, nx[level], lo});
      r = push(BGate{BOp::Or, h, l});
    }
    memo.emplace(key, r);
    return r;
  };

  for (int k = 0; k < out_bits; ++k) {
    std::vector<int> layer(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) layer[i] = ((table[i] >> k) & 1) ? one : zero;
    for (int level = 0; level < in_bits; ++level) {
      std::vector<int> next(layer.size() / 2);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = mux(level, layer[2 * i + 1], layer[2 * i]);
      layer.swap(next);
    }
    c.outputs.push_back(layer[0]);
  }
  return c;
}

Bits to_bits(std::uint64_t v, int width) {
  Bits b(width);
  for (int i = 0; i < width; ++i) b[i] = (v >> i) & 1;
  return b;
}

std::uint64_t from_bits(const Bits& b) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[i]) v |= std::uint64_t{1} << i;
  return v;
}

}  // namespace cls
