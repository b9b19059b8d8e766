// Parallel kernels against their serial references.

#include "flowscope/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using namespace flowscope;

struct Pairs
{
  std::vector<std::uint32_t> left;
  std::vector<std::uint32_t> right;
};

Pairs make_pairs(std::size_t n, std::uint32_t rows, std::uint32_t cols)
{
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint32_t> l(0, rows - 1);
  std::uniform_int_distribution<std::uint32_t> r(0, cols - 1);
  Pairs p;
  p.left.resize(n);
  p.right.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.left[i] = l(rng);
    p.right[i] = r(rng);
  }
  return p;
}

void BM_TallyParallel(benchmark::State& state)
{
  const auto p = make_pairs(static_cast<std::size_t>(state.range(0)), 500, 500);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::tally_pairs(p.left, p.right, 500, 500));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TallySerial(benchmark::State& state)
{
  const auto p = make_pairs(static_cast<std::size_t>(state.range(0)), 500, 500);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::tally_pairs_serial(p.left, p.right, 500, 500));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::pair<std::vector<double>, std::vector<double>> kde_input(std::size_t n)
{
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> samples(n);
  for (auto& s : samples) {
    s = d(rng);
  }
  std::vector<double> grid(256);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    grid[g] = -4.0 + 8.0 * static_cast<double>(g) / 255.0;
  }
  return { samples, grid };
}

void BM_KdeParallel(benchmark::State& state)
{
  const auto [samples, grid] = kde_input(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::gaussian_kde(samples, grid, 0.2));
  }
}

void BM_KdeSerial(benchmark::State& state)
{
  const auto [samples, grid] = kde_input(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::gaussian_kde_serial(samples, grid, 0.2));
  }
}

} // namespace

BENCHMARK(BM_TallyParallel)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_TallySerial)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_KdeParallel)->Arg(1000)->Arg(20000);
BENCHMARK(BM_KdeSerial)->Arg(1000)->Arg(20000);

BENCHMARK_MAIN();
