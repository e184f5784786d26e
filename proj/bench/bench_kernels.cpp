// Serial vs OpenMP kernels on random unit vectors.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "datekit/kernels.hpp"

namespace {

using namespace datekit::kernels;

constexpr std::size_t kDim = 384;

std::vector<double> random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(kDim);
  double sq = 0;
  for (auto& x : v) {
    x = g(rng);
    sq += x * x;
  }
  for (auto& x : v) x /= std::sqrt(sq);
  return v;
}

struct Inputs {
  ReferenceSet refs;
  VectorBlock candidates{kDim};
};

Inputs make_inputs(std::size_t n) {
  std::mt19937_64 rng(n);
  Inputs in;
  in.refs.vectors = VectorBlock(kDim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = random_unit(rng);
    const std::span<const double> row(r);
    const double norm = 1.0;
    in.refs.add_row(std::span<const std::span<const double>>(&row, 1), std::span<const double>(&norm, 1));
    in.candidates.push_back(random_unit(rng), 1.0);
  }
  return in;
}

template <auto Kernel>
void similarity(benchmark::State& state) {
  const auto in = make_inputs(std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(in.refs, in.candidates));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <auto Kernel>
void ranks(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto in = make_inputs(n);
  const auto matrix = serial::similarity_matrix(in.refs, in.candidates);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(matrix, n));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

BENCHMARK(similarity<serial::similarity_matrix>)->Name("similarity/serial")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(similarity<parallel::similarity_matrix>)->Name("similarity/parallel")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(ranks<serial::competition_ranks>)->Name("ranks/serial")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(ranks<parallel::competition_ranks>)->Name("ranks/parallel")->RangeMultiplier(4)->Range(16, 1024);

}  // namespace

BENCHMARK_MAIN();
