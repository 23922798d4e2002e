#pragma once

#include "cls/circuits.hpp"
#include "cls/tfnp.hpp"

#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace cls {

struct SampleParams {
  int n = 0;
  int k = 0;
  Integer N;                // 2^k
  int sample_count = 0;     // 2n + 1
  Rational spacing;         // 1 / (4nN)
  Rational bad_threshold;   // 1 / (8nN)
  // smallest k with 2^k >= 4L/eps
  static SampleParams make(int n, const Rational& L, const Rational& eps);
  static SampleParams with_k(int n, int k);
};

using CubeIndex = std::vector<std::int64_t>;  // 1-based per coordinate

std::int64_t subcube_index(const Rational& x, const Integer& N);
CubeIndex subcube_index(const Vec& x, const Integer& N);
Vec subcube_centre(const CubeIndex& p, const Integer& N);

struct SampleSet {
  std::vector<Vec> T;
  std::set<CubeIndex> S;
};

SampleSet sample_set(const Vec& x, const SampleParams& p);
// samples with a coordinate strictly closer than 1/(8nN) to an inner boundary
std::size_t bad_sample_count(const Vec& x, const SampleParams& p);

// One input t, output min{1, max{0, 8nN t}}.
LinearCircuit phi_gadget(const SampleParams& p);
// One input y in [0,1], outputs b_1..b_k (most significant first).
LinearCircuit bit_extract_fragment(const SampleParams& p, int k);
// `count` inputs, outputs the sorted values (ascending); median is output count/2.
LinearCircuit median_network(int count);

struct LinearApprox {
  LinearCircuit F;
  SampleParams params;
  Rational eps;
  Rational L;
  Rational M;
  int m = 0;                                 // output bits of C
  std::vector<std::vector<std::uint64_t>> C;  // per output: C(p) for p in [N]^n, first coordinate fastest
  Box domain;                                // the box F approximates f on
};

struct ApproxOptions {
  std::optional<Rational> M;
  Box domain;  // defaults to [0,1]^n when empty
};

// Throws IllBehavedInput for circuits that are not well-behaved and
// GuardExceeded when N^n > 2^20 (the grid values are tabulated).
LinearApprox approximate_circuit(const ArithCircuit& f, const Rational& L, const Rational& eps,
                                 const ApproxOptions& opt = {});

// y = centre of argmax_{p in S(x)} |f(x) - f(p^)| with the guarantee
// |f(x) - f(y)| > L ||x - y||_inf + eps/2; throws NoWitness otherwise.
// x and y are in [0,1]^n coordinates of the approximation.
Vec violation_witness(const ArithCircuit& f, const Vec& x, const SampleParams& p, const Rational& L,
                      const Rational& eps);

Vec fd_gradient(const std::function<Rational(const Vec&)>& f, const Vec& x, const Rational& h);

// Exact evaluation of a linear circuit in scaled 128-bit integers.  All
// values are kept as multiples of one common denominator; construction
// fails (ok() == false) when the static value bounds do not fit.
class ScaledLinearEval {
 public:
  ScaledLinearEval(const LinearCircuit& c, const Integer& input_den, const Box& input_box);
  bool ok() const { return ok_; }
  // x must lie in input_box with denominators dividing input_den
  Vec eval(const Vec& x) const;

 private:
  struct G {
    Op op;
    int a, b;
    __int128 p, q;  // constant (scaled) or MulC numerator / denominator
  };
  std::vector<G> gates_;
  std::vector<int> outputs_;
  Integer D_;
  bool ok_ = false;
};

struct GdFdInstance {
  Rational eps;
  Rational eta;
  Rational h;
  Domain domain;  // [0,1]^n
  LinearApprox approx;
  Rational eval_F(const Vec& x) const;
};

struct GdFdParams {
  Rational eps, h, delta;
};

GdFdParams gd_fd_params(const Rational& eps, const Rational& eta, const Rational& L);

// F approximates f on [-1,2]^n to within delta.
GdFdInstance gd_fd_instance(const GdInstance& src, const std::optional<Rational>& M = std::nullopt);

bool check_gd_fd(const GdFdInstance& inst, const Vec& x);

struct GdFdRun {
  bool stopped = false;
  Vec x;
  std::uint64_t iters = 0;
};

GdFdRun gd_fd_solve(const GdFdInstance& inst, const Vec& start, std::uint64_t max_iters);

}  // namespace cls
