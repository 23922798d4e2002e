// Serial reference vs OpenMP kernels for the three grid-wide scans.
#include "cls/instances.hpp"
#include "cls/scans.hpp"
#include "cls/square_verifier.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

using namespace cls;

namespace {

const Grid& desk() {
  static const Grid g(desk_eol(), desk_iter());
  return g;
}

const Enumeration& archetypes() {
  static const Enumeration e = [] {
    Enumeration a = enumerate_archetypes(desk());
    merge_enumeration(a, enumerate_archetypes(Grid(coverage_eol(), coverage_iter())));
    return a;
  }();
  return e;
}

void regime_serial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(regime_scan_serial(desk()));
}
void regime_parallel(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(regime_scan_parallel(desk()));
  s.counters["threads"] = omp_get_max_threads();
}

void decoder_serial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(decoder_scan_serial(desk(), Rational(1, 100)));
}
void decoder_parallel(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(decoder_scan_parallel(desk(), Rational(1, 100)));
  s.counters["threads"] = omp_get_max_threads();
}

void falsifier_serial(benchmark::State& s) {
  const Enumeration& e = archetypes();
  for (auto _ : s) benchmark::DoNotOptimize(falsify_all_serial(e, FalsifyOptions{}));
}
void falsifier_parallel(benchmark::State& s) {
  const Enumeration& e = archetypes();
  for (auto _ : s) benchmark::DoNotOptimize(falsify_all_parallel(e, FalsifyOptions{}));
  s.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(regime_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(regime_parallel)->Unit(benchmark::kMillisecond);
// a full decoder scan takes tens of seconds per kernel on one core
BENCHMARK(decoder_serial)->Unit(benchmark::kSecond)->Iterations(1);
BENCHMARK(decoder_parallel)->Unit(benchmark::kSecond)->Iterations(1);
BENCHMARK(falsifier_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(falsifier_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
