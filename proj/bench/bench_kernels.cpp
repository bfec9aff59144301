// Serial reference kernels against their OpenMP counterparts. The OpenMP
// cosine kernel also walks an inverted index, so compare its 1-thread run with
// the serial one to separate the algorithmic gain from the threading gain.

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "mmcoord/kernels.hpp"
#include "support.hpp"

using namespace mmcoord;
using namespace mmcoord::kernels;

namespace {

SparseRows user_item_rows(std::size_t users, std::uint32_t items, std::size_t per_user) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint32_t> pick(0, items - 1);
  std::uniform_real_distribution<double> val(0.1, 3.0);
  SparseRows m;
  for (std::size_t u = 0; u < users; ++u) {
    std::map<std::uint32_t, double> row;
    while (row.size() < per_user) row[pick(rng)] = val(rng);
    m.push_row({row.begin(), row.end()});
  }
  return m;
}

WeightedGraph random_graph(std::uint32_t n, double p) {
  std::mt19937_64 rng(2);
  return WeightedGraph::from_edges(n, testsupport::random_edges(rng, n, p));
}

void BM_CosineSerial(benchmark::State& s) {
  const auto m = user_item_rows(static_cast<std::size_t>(s.range(0)), 2000, 20);
  for (auto _ : s) benchmark::DoNotOptimize(pairwise_cosine_serial(m));
}

void BM_CosineOmp(benchmark::State& s) {
  const auto m = user_item_rows(static_cast<std::size_t>(s.range(0)), 2000, 20);
  for (auto _ : s) benchmark::DoNotOptimize(pairwise_cosine_omp(m, static_cast<int>(s.range(1))));
}

void BM_PagerankSerial(benchmark::State& s) {
  const auto g = random_graph(static_cast<std::uint32_t>(s.range(0)), 0.01);
  for (auto _ : s) benchmark::DoNotOptimize(pagerank_serial(g, 0.85, 1e-12));
}

void BM_PagerankOmp(benchmark::State& s) {
  const auto g = random_graph(static_cast<std::uint32_t>(s.range(0)), 0.01);
  for (auto _ : s) benchmark::DoNotOptimize(pagerank_omp(g, 0.85, 1e-12, 10000, static_cast<int>(s.range(1))));
}

}  // namespace

BENCHMARK(BM_CosineSerial)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CosineOmp)->ArgsProduct({{1000, 4000}, {1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PagerankSerial)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PagerankOmp)->ArgsProduct({{2000, 8000}, {1, 2, 4}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
