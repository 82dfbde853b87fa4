#include <random>

#include <benchmark/benchmark.h>

#include "dfocast/nn.hpp"

using namespace dfocast;

namespace {

std::vector<WindowedSample> samples(std::size_t n, int T, int Q) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<WindowedSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].input = Eigen::MatrixXd::NullaryExpr(T, Q, [&] { return normal(rng); });
    out[i].target = normal(rng);
    out[i].target_index = i;
  }
  return out;
}

nn::Seq2SeqModel model(int T, int H, int layers, Eigen::Index Q) {
  nn::Seq2SeqConfig c;
  c.window = T;
  c.hidden = H;
  c.layers = layers;
  return nn::init_weights(c, Q, 1);
}

void BM_Forward(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0)), H = static_cast<int>(state.range(1));
  const auto m = model(T, H, 1, 1);
  const auto s = samples(1, T, 1);
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward(m, s[0].input));
}
BENCHMARK(BM_Forward)->Args({24, 16})->Args({48, 32});

void BM_Gradients(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0)), H = static_cast<int>(state.range(1));
  const auto m = model(T, H, static_cast<int>(state.range(2)), 1);
  const auto s = samples(32, T, 1);
  for (auto _ : state) benchmark::DoNotOptimize(nn::compute_gradients(m, s).loss);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_Gradients)->Args({24, 16, 1})->Args({24, 16, 2})->Args({48, 32, 1});

void BM_Fit(benchmark::State& state) {
  nn::Seq2SeqConfig c;
  c.window = 12;
  c.hidden = 8;
  c.epochs = 5;
  c.batch_size = 16;
  const auto s = samples(256, 12, 2);
  for (auto _ : state) benchmark::DoNotOptimize(nn::fit(nn::init_weights(c, 2, 1), s).train_loss);
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMillisecond);

}  // namespace
