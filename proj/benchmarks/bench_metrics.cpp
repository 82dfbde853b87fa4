#include <random>

#include <benchmark/benchmark.h>

#include "dfocast/metrics.hpp"

using namespace dfocast;

namespace {

void BM_ErrorReport(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(5, 2);
  std::vector<double> a(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = normal(rng);
    p[i] = normal(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(metrics::error_report({a, p}).maape);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ErrorReport)->Arg(1 << 10)->Arg(1 << 16);

}  // namespace
