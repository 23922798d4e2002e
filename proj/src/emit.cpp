// Emission of the f and grad f circuits.  Everything up to the bicubic
// evaluation is linear apart from CMP gates; only the final polynomial
// uses true multiplications.
#include "cls/builder.hpp"
#include "cls/kkt_compiler.hpp"

#include <array>
#include <map>

namespace cls {

namespace {

struct CoordInfo {
  int value;               // integer coordinate X in [0, N]
  std::vector<int> enc;    // n bits of v-1 for the owning big square
  int v;                   // v as a value
  int local;               // coordinate inside the big square, [0, s]
};

class Emitter {
 public:
  Emitter(const Grid& g, Builder& b)
      : g_(g), gs_(g.spec()), b_(b),
        S_(preprocess_eol(g.eol()).S), P_(preprocess_eol(g.eol()).P), C_(preprocess_iter(g.iter()).C) {}

  // returns (f, fx, fy)
  std::array<int, 3> build() {
    const int n = gs_.n, m = gs_.m;
    const int kbits = n + m + 4;
    const Rational N(static_cast<long>(gs_.N));
    int x = b_.input(0), y = b_.input(1);
    auto split = [&](int in, int& base_val, std::vector<int>& bits, int& local) {
      int c = b_.clamp(in, 0, N - 1);
      bits = b_.floor_bits(c, kbits);
      base_val = b_.from_bits(bits);
      local = b_.sub(in, base_val);
    };
    int xh, yh, u, w;
    std::vector<int> xbits, ybits;
    split(x, xh, xbits, u);
    split(y, yh, ybits, w);

    CoordInfo X[2] = {coord_from_bits(xh, xbits), coord_of(b_.add(xh, b_.constant(1)))};
    CoordInfo Y[2] = {coord_from_bits(yh, ybits), coord_of(b_.add(yh, b_.constant(1)))};

    // S', P' at the x side, S' at the y side
    std::array<int, 2> SX, PX, SY;
    for (int k = 0; k < 2; ++k) {
      SX[k] = map_value(S_, X[k].enc);
      PX[k] = map_value(P_, X[k].enc);
      SY[k] = map_value(S_, Y[k].enc);
    }

    int fc[2][2], fxc[2][2], fyc[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) corner(X[i], Y[j], SX[i], PX[i], SY[j], fc[i][j], fxc[i][j], fyc[i][j]);

    // a = A F A^T with F assembled from the corner wires
    static const int A[4][4] = {{1, 0, 0, 0}, {0, 0, 1, 0}, {-3, 3, -2, -1}, {2, -2, 1, 1}};
    int F[4][4];
    const int zero = b_.constant(0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        F[i][j] = fc[i][j];
        F[i][2 + j] = fyc[i][j];
        F[2 + i][j] = fxc[i][j];
        F[2 + i][2 + j] = zero;
      }
    int a[4][4];
    for (int r = 0; r < 4; ++r)
      for (int q = 0; q < 4; ++q) {
        std::map<int, Rational> acc;
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            const int coef = A[r][k] * A[q][l];
            if (coef && F[k][l] != zero) acc[F[k][l]] += coef;
          }
        std::vector<std::pair<Rational, int>> terms;
        for (auto& [wire, c] : acc)
          if (c != 0) terms.emplace_back(c, wire);
        a[r][q] = b_.lincomb(terms);
      }

    int up[4] = {b_.constant(1), u, b_.mul(u, u), 0};
    int wp[4] = {b_.constant(1), w, b_.mul(w, w), 0};
    up[3] = b_.mul(up[2], u);
    wp[3] = b_.mul(wp[2], w);
    std::vector<int> fterms, gx, gy;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        fterms.push_back(b_.mul(a[i][j], b_.mul(up[i], wp[j])));
        if (i) gx.push_back(b_.mulc(i, b_.mul(a[i][j], b_.mul(up[i - 1], wp[j]))));
        if (j) gy.push_back(b_.mulc(j, b_.mul(a[i][j], b_.mul(up[i], wp[j - 1]))));
      }
    return {b_.sum(fterms), b_.sum(gx), b_.sum(gy)};
  }

 private:
  CoordInfo coord_from_bits(int value, const std::vector<int>& bits) {
    // value <= N-1 here, so the owning square is read off the bits directly
    CoordInfo c;
    c.value = value;
    const int lb = gs_.m + 4;
    c.enc.assign(bits.begin() + lb, bits.end());
    c.v = b_.add(b_.from_bits(c.enc), b_.constant(1));
    c.local = b_.from_bits(std::vector<int>(bits.begin(), bits.begin() + lb));
    return c;
  }

  CoordInfo coord_of(int value) {
    const int lb = gs_.m + 4, kb = gs_.n + gs_.m + 5;
    auto bits = b_.floor_bits(value, kb);
    const int top = bits[kb - 1];  // value == N: last square, local = s
    CoordInfo c;
    c.value = value;
    for (int k = 0; k < gs_.n; ++k) c.enc.push_back(b_.bor(bits[lb + k], top));
    c.v = b_.add(b_.from_bits(c.enc), b_.constant(1));
    c.local = b_.add(b_.from_bits(std::vector<int>(bits.begin(), bits.begin() + lb)),
                     b_.mulc(Rational(static_cast<long>(gs_.big_side)), top));
    return c;
  }

  int map_value(const BoolCircuit& c, const std::vector<int>& enc) {
    return b_.add(b_.from_bits(b_.inline_bool(c, enc)), b_.constant(1));
  }

  std::vector<int> map_bits(const BoolCircuit& c, const std::vector<int>& enc) { return b_.inline_bool(c, enc); }

  // One-hot big square type flags for (V1, V2).
  std::array<int, kBigTypeCount> type_flags(int V1, int V2, int S1, int P1, int S2) {
    Builder& b = b_;
    std::array<int, kBigTypeCount> t{};
    auto F = [&](BigType k) -> int& { return t[static_cast<int>(k)]; };
    const int d = b.eq(V1, V2);
    const int one1 = b.eq_const(V1, 1);
    // diagonal
    const int hp = b.bnot(b.eq(P1, V1)), hq = b.bnot(b.eq(S1, V1));
    const int dg = b.band(d, b.bnot(one1));
    F(BigType::S) = b.band(d, one1);
    const int both = b.band({dg, hp, hq});
    F(BigType::G4) = b.band({both, b.lt(P1, V1), b.lt(V1, S1)});
    F(BigType::O4) = b.band({both, b.lt(V1, P1), b.lt(S1, V1)});
    F(BigType::LA) = b.band({both, b.lt(P1, V1), b.lt(S1, V1)});
    F(BigType::LB) = b.band({both, b.lt(V1, P1), b.lt(V1, S1)});
    const int only_q = b.band({dg, b.bnot(hp), hq});
    const int only_p = b.band({dg, hp, b.bnot(hq)});
    F(BigType::G5) = b.band(only_q, b.lt(V1, S1));
    F(BigType::O5) = b.band(only_q, b.lt(S1, V1));
    F(BigType::G6) = b.band(only_p, b.lt(P1, V1));
    F(BigType::O6) = b.band(only_p, b.lt(V1, P1));
    // off-diagonal
    F(BigType::E2) = b.band(b.bnot(d), one1);
    const int has_s = b.bnot(b.eq(S2, V2));
    const int has_p = b.bnot(b.eq(P1, V1));
    const int turn = b.eq(S2, V1);
    const int below = b.cmp(V1, V2);
    const int above = b.band(b.cmp(V2, V1), b.bnot(one1));
    {
      const int h = b.band(has_s, b.lt(V1, S2));
      const int v = b.band(has_p, b.lt(P1, V2));
      const int go = b.band(below, b.bnot(turn));
      F(BigType::G3) = b.band(below, turn);
      F(BigType::G7) = b.band({go, h, v});
      F(BigType::G1) = b.band({go, h, b.bnot(v)});
      F(BigType::G2) = b.band({go, b.bnot(h), v});
    }
    {
      const int h = b.band(has_s, b.lt(S2, V1));
      const int v = b.band(has_p, b.lt(V2, P1));
      const int go = b.band(above, b.bnot(turn));
      F(BigType::O3) = b.band(above, turn);
      F(BigType::O7) = b.band({go, h, v});
      F(BigType::O1) = b.band({go, h, b.bnot(v)});
      F(BigType::O2) = b.band({go, b.bnot(h), v});
    }
    F(BigType::E1) = b.constant(0);  // no rules; environment is the default
    return t;
  }

  void corner(const CoordInfo& X, const CoordInfo& Y, int S1, int P1, int S2, int& fval, int& fx, int& fy) {
    Builder& b = b_;
    const Rational s(static_cast<long>(gs_.big_side));
    auto t = type_flags(X.v, Y.v, S1, P1, S2);
    std::array<int, kBaseTemplateCount> base;
    base.fill(b.constant(0));
    std::vector<int> refl_terms;
    for (int k = 0; k < kBigTypeCount; ++k) {
      BigType bt = static_cast<BigType>(k);
      int& slot = base[static_cast<int>(base_template(bt))];
      slot = b.bor(slot, t[k]);
      if (is_reflected(bt)) refl_terms.push_back(t[k]);
    }
    const int refl = b.bor(refl_terms);
    const int li = b.add(X.local, b.select(refl, b.sub(b.constant(s), b.mulc(2, X.local)), s));
    const int lj = b.add(Y.local, b.select(refl, b.sub(b.constant(s), b.mulc(2, Y.local)), s));

    const Rational kCodeBound = 20;
    auto code_of = [](PointData d) { return Rational(static_cast<int>(d.color) * 4 + static_cast<int>(d.arrow)); };
    int code = b.constant(code_of(PointData{}));
    for (int bt = 0; bt < kBaseTemplateCount; ++bt) {
      const auto& rects = g_.base(static_cast<BaseTemplate>(bt)).rects;
      for (const auto& r : rects) {
        int hit = b.band({base[bt], b.in_range(li, static_cast<long>(r.x0), static_cast<long>(r.x1)),
                          b.in_range(lj, static_cast<long>(r.y0), static_cast<long>(r.y1))});
        code = b.mux(hit, b.constant(code_of(r.data)), code, kCodeBound);
      }
    }

    // labyrinth, in the case-A frame
    const std::int64_t M = std::int64_t{1} << gs_.m;
    const int dx = b.sub(b.constant(static_cast<long>(gs_.lab_x0())), li);
    const int dy = b.sub(lj, b.constant(static_cast<long>(gs_.lab_y0())));
    const int in_lab = b.band({base[static_cast<int>(BaseTemplate::LA)], b.in_range(dx, 1, static_cast<long>(4 * M)),
                               b.in_range(dy, 0, static_cast<long>(4 * M - 1))});
    const int m = gs_.m;
    auto w1 = b.floor_bits(b.clamp(b.sub(dx, b.constant(1)), 0, static_cast<long>(4 * M - 1)), m + 2);
    auto w2 = b.floor_bits(b.clamp(dy, 0, static_cast<long>(4 * M - 1)), m + 2);
    const int a_val = b.sub(b.constant(3), b.from_bits({w1[0], w1[1]}));
    const int b_val = b.from_bits({w2[0], w2[1]});
    std::vector<int> e1(w1.begin() + 2, w1.end()), e2(w2.begin() + 2, w2.end());
    const int one = b.constant(1);
    const int U1 = b.add(b.from_bits(e1), one), U2 = b.add(b.from_bits(e2), one);
    auto c1b = map_bits(C_, e1);
    auto c2b = map_bits(C_, e2);
    const int C1 = b.add(b.from_bits(c1b), one), C2 = b.add(b.from_bits(c2b), one);
    const int CC1 = map_value(C_, c1b), CC2 = map_value(C_, c2b);
    const int U0 = b.sub(U1, one);  // u1 - 1
    const int valid0 = b.ge_const(U1, 2);
    auto e0 = b.floor_bits(b.max(b.sub(U1, b.constant(2)), b.constant(0)), m);
    const int C0 = map_value(C_, e0);

    const int diag = b.eq(U1, U2);
    const int lower = b.cmp(U1, U2);
    const int tr1 = b.lt(U1, C1);
    const int tr0 = b.band({valid0, b.lt(U0, C0), b.lt(U2, U0)});
    const int blue = b.band({b.lt(U2, C2), b.lt(C2, CC2), b.bnot(b.cmp(U1, C2))});
    const int cc1 = b.lt(C1, CC1);
    std::array<int, 8> mk{};
    mk.fill(b.constant(0));
    mk[4] = b.band({diag, tr1, cc1});
    mk[2] = b.band({diag, tr1, b.bnot(cc1)});
    const int merge = b.band(blue, b.bnot(tr0));
    mk[5] = b.band({lower, tr1, merge});
    mk[1] = b.band({lower, tr1, b.bnot(merge)});
    mk[6] = b.band({lower, b.bnot(tr1), blue, tr0});
    mk[3] = b.band({lower, b.bnot(tr1), merge});
    for (int kind = 1; kind <= 6; ++kind)
      for (int ca = 0; ca < 4; ++ca)
        for (int cb = 0; cb < 4; ++cb) {
          auto d = medium_cell(kind, ca, cb);
          if (!d) continue;
          int hit = b.band({in_lab, mk[kind], b.eq_const(a_val, ca), b.eq_const(b_val, cb)});
          code = b.mux(hit, b.constant(code_of(*d)), code, kCodeBound);
        }

    // decode, apply the colour swap of reflected types
    int col[5], arr[4];
    for (int c = 0; c < 5; ++c) col[c] = b.constant(0);
    for (int a = 0; a < 4; ++a) arr[a] = b.constant(0);
    for (int c = 0; c < 5; ++c)
      for (int a = 0; a < 4; ++a) {
        int hit = b.eq_const(code, c * 4 + a);
        col[c] = b.bor(col[c], hit);
        arr[a] = b.bor(arr[a], hit);
      }
    const int nrefl = b.bnot(refl);
    int colr[5];
    for (int c = 0; c < 5; ++c) colr[c] = b.bor(b.band(nrefl, col[c]), b.band(refl, col[4 - c]));

    const Rational N(static_cast<long>(gs_.N));
    const Rational bound = 6 * N + 40;
    std::vector<int> fparts;
    for (int c = 0; c < 5; ++c) {
      int rv;
      switch (static_cast<Color>(c)) {
        case Color::Red: rv = b.lincomb({{1, X.value}, {-1, Y.value}}, 4 * N + 20); break;
        case Color::Orange: rv = b.lincomb({{-1, X.value}, {-1, Y.value}}, 4 * N + 10); break;
        case Color::Black: rv = b.lincomb({{1, X.value}, {1, Y.value}}); break;
        case Color::Green: rv = b.lincomb({{-1, X.value}, {-1, Y.value}}, -10); break;
        default: rv = b.lincomb({{1, X.value}, {-1, Y.value}}, -2 * N - 20); break;
      }
      fparts.push_back(b.select(colr[c], rv, bound));
    }
    fval = b.sum(fparts);
    std::vector<std::pair<Rational, int>> gxs, gys;
    for (int a = 0; a < 4; ++a) {
      auto [gx, gy] = arrow_gradient(static_cast<Arrow>(a));
      if (gx != 0) gxs.emplace_back(gx, arr[a]);
      if (gy != 0) gys.emplace_back(gy, arr[a]);
    }
    fx = b.lincomb(gxs);
    fy = b.lincomb(gys);
  }

  const Grid& g_;
  const GridSpec& gs_;
  Builder& b_;
  BoolCircuit S_, P_, C_;
};

}  // namespace

EmittedCircuits emit_circuits(const Grid& g) {
  Builder b(2);
  Emitter e(g, b);
  auto out = e.build();
  EmittedCircuits ec;
  ec.f = b.finish({out[0]});
  ec.grad = b.finish({out[1], out[2]});
  return ec;
}

}  // namespace cls
