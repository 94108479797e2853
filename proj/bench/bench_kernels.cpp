// OpenMP kernels against the serial reference on the reference problem size
// (L=50, d=20, N=3, rho=0.2). Arg = batch size.

#include <benchmark/benchmark.h>

#include <random>

#include "tailgame/kernels.hpp"
#include "tailgame/reference.hpp"

using namespace tailgame;

namespace {

struct Problem {
  FrequencyTable ft;
  Partition partition;
  std::vector<PlayerModel> players;
  GameSpec spec;
  Matrix X, Y;
};

Problem make_problem(std::size_t B) {
  const std::size_t L = 50, d = 20;
  Problem p;
  std::vector<std::size_t> counts(L);
  for (std::size_t l = 0; l < L; ++l) counts[l] = 1200 / (l + 1);
  p.ft = frequencies_from_counts(counts, 2000);
  p.partition = partition_labels(p.ft, 3, 0.2);
  p.players = init_players(p.partition, d, 0.1, 1);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1);
  std::bernoulli_distribution b(0.1);
  p.X = Matrix(B, d);
  p.Y = Matrix(B, L);
  for (double& v : p.X.values()) v = n(rng);
  for (double& v : p.Y.values()) v = b(rng);
  return p;
}

void BM_forward_kernel(benchmark::State& s) {
  const auto p = make_problem(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::forward_batch(p.players[0], p.X));
}

void BM_forward_reference(benchmark::State& s) {
  const auto p = make_problem(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(reference::forward_batch(p.players[0], p.X));
}

void BM_fuse_kernel(benchmark::State& s) {
  const auto p = make_problem(static_cast<std::size_t>(s.range(0)));
  const auto w = resolve_fusion_weights(p.spec.fusion, p.partition);
  for (auto _ : s) {
    std::vector<Matrix> probs;
    for (const auto& pl : p.players) probs.push_back(kernels::forward_batch(pl, p.X));
    benchmark::DoNotOptimize(kernels::fuse_batch(probs, p.partition, p.spec.fusion.strategy, w));
  }
}

void BM_fuse_reference(benchmark::State& s) {
  const auto p = make_problem(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(reference::fuse_batch(p.players, p.partition, p.spec.fusion, p.X));
}

void BM_gradient_kernel(benchmark::State& s) {
  const auto p = make_problem(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) {
    benchmark::DoNotOptimize(kernels::player_gradient(1, p.players, p.partition, p.ft, p.spec, p.X, p.Y));
  }
}

void BM_gradient_reference(benchmark::State& s) {
  const auto p = make_problem(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) {
    benchmark::DoNotOptimize(reference::player_gradient(1, p.players, p.partition, p.ft, p.spec, p.X, p.Y));
  }
}

}  // namespace

BENCHMARK(BM_forward_kernel)->Arg(64)->Arg(2000);
BENCHMARK(BM_forward_reference)->Arg(64)->Arg(2000);
BENCHMARK(BM_fuse_kernel)->Arg(64)->Arg(2000);
BENCHMARK(BM_fuse_reference)->Arg(64)->Arg(2000);
BENCHMARK(BM_gradient_kernel)->Arg(64)->Arg(2000);
BENCHMARK(BM_gradient_reference)->Arg(64)->Arg(2000);

BENCHMARK_MAIN();
