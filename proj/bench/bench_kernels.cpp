// Serial reference kernels against the OpenMP ones. The parallel variants
// take the worker count as the benchmark argument.

#include <benchmark/benchmark.h>

#include "mmconc/doubling.hpp"
#include "mmconc/families.hpp"
#include "mmconc/parallel.hpp"
#include "mmconc/separation.hpp"

using namespace mmconc;

namespace {

FiniteMMSpace sep_space() {
  FamilySpec spec = FamilySpec::discrete_torus(11);
  return generate(spec);
}

const SepQuery kSepQuery{0.25, 0.25};

void BM_SepExactSerial(benchmark::State& state) {
  const auto s = sep_space();
  for (auto _ : state) benchmark::DoNotOptimize(reference::sep_exact_serial(s, kSepQuery).value);
}

void BM_SepExactParallel(benchmark::State& state) {
  const auto s = sep_space();
  set_worker_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sep_exact(s, kSepQuery).value);
}

void BM_DoublingSerial(benchmark::State& state) {
  const auto cube = generate(FamilySpec::hamming_cube(9));
  for (auto _ : state) benchmark::DoNotOptimize(reference::doubling_profile_serial(cube, 1.0).sup());
}

void BM_DoublingParallel(benchmark::State& state) {
  const auto cube = generate(FamilySpec::hamming_cube(9));
  set_worker_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(doubling_profile(cube, 1.0).sup());
}

void BM_TriangleSerial(benchmark::State& state) {
  const RawSpace raw = generate(FamilySpec::hamming_cube(8)).to_raw();
  for (auto _ : state) benchmark::DoNotOptimize(reference::count_triangle_violations(raw));
}

void BM_ValidateParallel(benchmark::State& state) {
  const RawSpace raw = generate(FamilySpec::hamming_cube(8)).to_raw();
  set_worker_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(validate_space(raw).report.ok());
}

}  // namespace

BENCHMARK(BM_SepExactSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SepExactParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DoublingSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DoublingParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TriangleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ValidateParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
