#include <benchmark/benchmark.h>

#include "haarfact/operators.hpp"
#include "haarfact/rng.hpp"

namespace {

using namespace haarfact;

HaarVector random_vector(int ambient, std::uint64_t seed) {
  HaarVector x = HaarVector::zero(ambient);
  Rng rng(seed);
  for (int i = 0; i < x.coeffs.size(); ++i) x.coeffs[i] = rng.normal();
  return x;
}

void BM_SynthesisNorm(benchmark::State& state) {
  const int ambient = static_cast<int>(state.range(0));
  const auto x = random_vector(ambient, 7);
  const SpaceSpec spec{2.0, RademacherMode::Constant};
  for (auto _ : state) benchmark::DoNotOptimize(hshs_norm_exact(x, spec));
  state.SetComplexityN(ambient);
}
BENCHMARK(BM_SynthesisNorm)->DenseRange(4, 12, 2);

void BM_SignAverageNorm(benchmark::State& state) {
  const int ambient = static_cast<int>(state.range(0));
  const auto x = random_vector(ambient, 7);
  const SpaceSpec spec{1.0, RademacherMode::Independent};
  for (auto _ : state) benchmark::DoNotOptimize(hshs_norm_exact(x, spec));
}
BENCHMARK(BM_SignAverageNorm)->DenseRange(1, 3, 1);

void BM_MonteCarloNorm(benchmark::State& state) {
  const int ambient = static_cast<int>(state.range(0));
  const auto x = random_vector(ambient, 7);
  const SpaceSpec spec{1.0, RademacherMode::Independent};
  MonteCarloOptions mc;
  mc.samples = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(hshs_norm_mc(x, spec, mc));
}
BENCHMARK(BM_MonteCarloNorm)->DenseRange(4, 8, 2);

void BM_OpNormLower(benchmark::State& state) {
  const int ambient = static_cast<int>(state.range(0));
  const SpaceSpec spec{2.0, RademacherMode::Constant};
  const auto T = random_operator(ambient, 1.0, 0.5, OperatorMode::Positive, 11, spec);
  for (auto _ : state) benchmark::DoNotOptimize(op_norm_lower(T, spec, 50, 3));
}
BENCHMARK(BM_OpNormLower)->DenseRange(3, 7, 2);

}  // namespace
