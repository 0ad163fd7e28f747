#include <benchmark/benchmark.h>

#include "haarfact/diagonalize.hpp"
#include "haarfact/reduce_positive.hpp"
#include "haarfact/stabilize.hpp"

namespace {

using namespace haarfact;

const SpaceSpec kL2{2.0, RademacherMode::Constant};

void BM_Gram(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto T = random_operator(N, 1.0, 0.5, OperatorMode::Positive, 11, kL2);
  const auto sys = random_faithful(1, N - 2, N, 5);
  for (auto _ : state) benchmark::DoNotOptimize(gram(T, sys));
}
BENCHMARK(BM_Gram)->DenseRange(5, 9, 2);

void BM_DiagonalizeSearch(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto T = random_operator(N, 1.0, 0.5, OperatorMode::Positive, 11, kL2);
  DiagonalizationParams params;
  params.n = 1;
  params.m = N - 2;
  params.off_threshold = 0.01;
  params.diag_threshold = 0.05;
  params.max_tries = 50;
  params.seed = 17;
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize_search(T, params));
}
BENCHMARK(BM_DiagonalizeSearch)->DenseRange(5, 9, 2);

void BM_Factorize(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto T = random_operator(N, 1.0, 0.5, OperatorMode::Positive, 11, kL2);
  StabilizationParams params;
  params.delta = 0.5;
  params.m = N - 2;
  params.ntilde = 1;
  params.bin_width = 0.5;
  params.off_threshold = 0.01;
  params.diag_threshold = 0.05;
  params.max_tries = 50;
  params.seed = 17;
  params.spec = kL2;
  for (auto _ : state)
    benchmark::DoNotOptimize(factorize(T, 1, params, FactorizeMode::PositiveDiagonal));
}
BENCHMARK(BM_Factorize)->DenseRange(6, 8, 1);

void BM_ReducePositive(benchmark::State& state) {
  const int Ntilde = static_cast<int>(state.range(0));
  const auto T =
      random_operator(Ntilde, 1.0, 0.5, OperatorMode::Signed, 11, kL2);
  for (auto _ : state)
    benchmark::DoNotOptimize(reduce_to_positive(T, 2, 0.5, 1.0, true));
}
BENCHMARK(BM_ReducePositive)->DenseRange(6, 8, 1);

}  // namespace
