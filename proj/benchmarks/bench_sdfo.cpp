#include <random>

#include <benchmark/benchmark.h>

#include "dfocast/sdfo.hpp"

using namespace dfocast;

namespace {

void BM_BuildModel(benchmark::State& state) {
  const auto P = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  sdfo::InterpolationSet set;
  for (std::size_t i = 0; i < sdfo::full_quadratic_size(static_cast<std::size_t>(P)); ++i) {
    set.points.push_back(Eigen::VectorXd::NullaryExpr(P, [&] { return u(rng); }));
    set.values.push_back(set.points.back().squaredNorm());
  }
  for (auto _ : state) benchmark::DoNotOptimize(sdfo::build_quadratic_model(set, set.points[0]).f);
}
BENCHMARK(BM_BuildModel)->Arg(2)->Arg(6)->Arg(12);

void BM_MinimizeQuadratic(benchmark::State& state) {
  const auto P = static_cast<std::size_t>(state.range(0));
  sdfo::SdfoConfig cfg;
  cfg.budget = 50;
  const Eigen::VectorXd opt = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(P), 0.3);
  for (auto _ : state) {
    const auto r = sdfo::minimize([&](const Eigen::VectorXd& x) { return (x - opt).squaredNorm(); }, P,
                                  cfg, 1);
    benchmark::DoNotOptimize(r.best_value);
  }
}
BENCHMARK(BM_MinimizeQuadratic)->Arg(1)->Arg(2)->Arg(6);

}  // namespace
