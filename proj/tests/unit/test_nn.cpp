#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dfocast/error.hpp"
#include "dfocast/model_io.hpp"
#include "dfocast/nn.hpp"
#include "oracles.hpp"

namespace nn = dfocast::nn;
using dfocast::Error;
using dfocast::ErrorKind;
using dfocast::WindowedSample;

namespace {

nn::Seq2SeqConfig tiny(int T = 4, int H = 3, int layers = 1, bool bias = false) {
  nn::Seq2SeqConfig c;
  c.window = T;
  c.hidden = H;
  c.layers = layers;
  c.use_bias = bias;
  c.seed = 3;
  return c;
}

// Nudges every bias away from zero so bias gradients are exercised.
void randomize_biases(nn::Seq2SeqModel& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  auto fill = [&](Eigen::VectorXd& v) {
    for (auto& x : v) x = u(rng);
  };
  for (auto* stack : {&m.encoder, &m.decoder}) {
    for (auto& w : *stack) {
      fill(w.forget_bias);
      fill(w.input_bias);
      fill(w.output_bias);
      fill(w.cell_bias);
    }
  }
  m.projection_bias = u(rng);
}

}  // namespace

TEST(Config, RejectsBadValues) {
  auto c = tiny();
  c.hidden = 0;
  EXPECT_THROW(c.validate(), Error);
  c = tiny();
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NO_THROW(tiny().validate());
}

TEST(InitWeights, DeterministicAndShaped) {
  const auto cfg = tiny(4, 4);
  const auto a = nn::init_weights(cfg, 2, 1);
  const auto b = nn::init_weights(cfg, 2, 1);
  const auto c = nn::init_weights(cfg, 2, 2);
  EXPECT_EQ(nn::flatten(a), nn::flatten(b));
  EXPECT_NE(nn::flatten(a), nn::flatten(c));
  EXPECT_EQ(a.encoder[0].forget_in.rows(), 4);
  EXPECT_EQ(a.encoder[0].forget_in.cols(), 2);
  EXPECT_EQ(a.encoder[0].cell_rec.rows(), 4);
  EXPECT_EQ(a.encoder[0].cell_rec.cols(), 4);
  EXPECT_LE(nn::flatten(a).cwiseAbs().maxCoeff(), 0.5);
  EXPECT_FALSE(a.encoder[0].has_bias());
}

TEST(InitWeights, StackedLayersConsumeHidden) {
  const auto m = nn::init_weights(tiny(4, 5, 3), 2, 1);
  ASSERT_EQ(m.encoder.size(), 3u);
  ASSERT_EQ(m.decoder.size(), 3u);
  EXPECT_EQ(m.encoder[0].input_size(), 2);
  EXPECT_EQ(m.encoder[1].input_size(), 5);
  EXPECT_EQ(m.decoder[2].input_size(), 5);
}

TEST(LstmStep, ZeroWeights) {
  const auto m = nn::zeros_like(nn::init_weights(tiny(4, 1), 1, 1));
  const auto s = nn::lstm_step(m.encoder[0], Eigen::VectorXd::Constant(1, 7.0),
                               nn::LstmState::zeros(1));
  EXPECT_EQ(s.h(0), 0.0);
  EXPECT_EQ(s.c(0), 0.0);

  nn::LstmState prev = nn::LstmState::zeros(1);
  prev.c(0) = 1.0;
  const auto s2 = nn::lstm_step(m.encoder[0], Eigen::VectorXd::Zero(1), prev);
  EXPECT_DOUBLE_EQ(s2.c(0), 0.5);
  EXPECT_NEAR(s2.h(0), 0.5 * std::tanh(0.5), 1e-15);
  EXPECT_NEAR(s2.h(0), 0.2311, 1e-4);
}

TEST(LstmStep, MatchesScalarOracle) {
  for (bool bias : {false, true}) {
    auto m = nn::init_weights(tiny(4, 2, 1, bias), 2, 11);
    if (bias) randomize_biases(m, 5);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0, 1);
    oracle::Cell prev{{n(rng), n(rng)}, {n(rng), n(rng)}};
    const std::vector<double> a{n(rng), n(rng)};
    nn::LstmState state{Eigen::Map<const Eigen::VectorXd>(prev.h.data(), 2),
                        Eigen::Map<const Eigen::VectorXd>(prev.c.data(), 2)};
    const auto got = nn::lstm_step(m.encoder[0], Eigen::Map<const Eigen::VectorXd>(a.data(), 2), state);
    const auto want = oracle::step(m.encoder[0], a, prev);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(got.h(j), want.h[static_cast<std::size_t>(j)], 1e-14);
      EXPECT_NEAR(got.c(j), want.c[static_cast<std::size_t>(j)], 1e-14);
    }
  }
}

TEST(LstmStep, DimensionMismatch) {
  const auto m = nn::init_weights(tiny(4, 2), 3, 1);
  try {
    nn::lstm_step(m.encoder[0], Eigen::VectorXd::Zero(2), nn::LstmState::zeros(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(LstmStep, GatesBoundedAndFinite) {
  const auto m = nn::init_weights(tiny(4, 6), 3, 4);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0, 5);
  nn::LstmState s = nn::LstmState::zeros(6);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd a(3);
    for (auto& x : a) x = n(rng);
    s = nn::lstm_step(m.encoder[0], a, s);
    ASSERT_TRUE(s.h.allFinite());
    ASSERT_TRUE(s.c.allFinite());
    // |h| = o * |tanh(c)| < 1 and |c| grows by less than 1 per step.
    ASSERT_LT(s.h.cwiseAbs().maxCoeff(), 1.0);
    ASSERT_LT(s.c.cwiseAbs().maxCoeff(), t + 1.0);
  }
}

TEST(Forward, ZeroModelAndProjectionLinearity) {
  auto m = nn::init_weights(tiny(5, 3), 2, 8);
  const auto samples = oracle::random_samples(3, 5, 2, 1);
  EXPECT_EQ(nn::forward(nn::zeros_like(m), samples[0].input), 0.0);
  const double y = nn::forward(m, samples[0].input);
  m.projection *= 3.0;
  EXPECT_NEAR(nn::forward(m, samples[0].input), 3.0 * y, 1e-14);
  EXPECT_NEAR(nn::predict(m, samples[0].input), 3.0 * y, 1e-14);
}

TEST(Forward, MatchesCompositionalOracle) {
  for (int layers : {1, 2}) {
    for (bool bias : {false, true}) {
      auto m = nn::init_weights(tiny(6, 4, layers, bias), 3, 21);
      if (bias) randomize_biases(m, 6);
      const auto samples = oracle::random_samples(40, 6, 3, 17);
      const auto batch = nn::predict_batch(m, samples);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const double want = oracle::forecast(m, samples[i].input);
        EXPECT_NEAR(nn::forward(m, samples[i].input), want, 1e-12);
        EXPECT_NEAR(batch[i], want, 1e-12);
      }
    }
  }
}

TEST(Forward, RejectsWrongRowCount) {
  const auto m = nn::init_weights(tiny(4, 3), 2, 1);
  EXPECT_THROW(nn::forward(m, Eigen::MatrixXd::Zero(3, 2)), Error);
  EXPECT_THROW(nn::forward(m, Eigen::MatrixXd::Zero(4, 3)), Error);
}

TEST(Gradients, MatchFiniteDifferences) {
  for (int layers : {1, 2}) {
    for (bool bias : {false, true}) {
      auto m = nn::init_weights(tiny(4, 3, layers, bias), 2, 5);
      if (bias) randomize_biases(m, 3);
      const auto samples = oracle::random_samples(5, 4, 2, 99);
      const auto check = oracle::check_gradients(m, samples);
      EXPECT_EQ(check.failures, 0u) << "layers=" << layers << " bias=" << bias
                                    << " worst=" << check.worst;
      EXPECT_EQ(check.parameters, nn::parameter_count(m));
    }
  }
}

TEST(Gradients, LossIsMeanSquaredError) {
  const auto m = nn::init_weights(tiny(4, 3), 2, 5);
  const auto samples = oracle::random_samples(7, 4, 2, 4);
  EXPECT_NEAR(nn::compute_gradients(m, samples).loss, oracle::mse(m, samples), 1e-12);
}

TEST(Gradients, ZeroErrorAtStationaryPoint) {
  const auto m = nn::zeros_like(nn::init_weights(tiny(4, 3), 2, 5));
  auto samples = oracle::random_samples(4, 4, 2, 4);
  for (auto& s : samples) s.target = 0.0;
  const auto g = nn::compute_gradients(m, samples);
  EXPECT_EQ(g.loss, 0.0);
  EXPECT_EQ(g.gradient.projection.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Gradients, DuplicatedBatchUnchanged) {
  const auto m = nn::init_weights(tiny(4, 3), 2, 5);
  const auto samples = oracle::random_samples(6, 4, 2, 4);
  auto doubled = samples;
  doubled.insert(doubled.end(), samples.begin(), samples.end());
  const auto a = nn::flatten(nn::compute_gradients(m, samples).gradient);
  const auto b = nn::flatten(nn::compute_gradients(m, doubled).gradient);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Gradients, IndexSubsetEqualsMaterializedSubset) {
  const auto m = nn::init_weights(tiny(4, 3), 2, 5);
  const auto samples = oracle::random_samples(6, 4, 2, 4);
  const std::vector<std::size_t> idx{4, 1, 1};
  const std::vector<WindowedSample> picked{samples[4], samples[1], samples[1]};
  const auto a = nn::compute_gradients(m, samples, idx);
  const auto b = nn::compute_gradients(m, picked);
  EXPECT_EQ(nn::flatten(a.gradient), nn::flatten(b.gradient));
  EXPECT_THROW(nn::compute_gradients(m, std::vector<WindowedSample>{}), Error);
}

TEST(Adam, FirstStepIsLearningRate) {
  std::vector<double> p{0.0, 5.0}, g{1.0, -3.0};
  auto s = nn::AdamState::for_size(2);
  nn::adam_update(p, g, s, 0.001);
  EXPECT_NEAR(p[0], -0.001, 1e-10);
  EXPECT_NEAR(p[1], 5.001, 1e-10);
  EXPECT_EQ(s.t, 1);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  std::vector<double> p{0.25, -1.0}, g{0.0, 0.0};
  auto s = nn::AdamState::for_size(2);
  nn::adam_update(p, g, s, 0.1);
  EXPECT_EQ(p[0], 0.25);
  EXPECT_EQ(p[1], -1.0);
}

TEST(Adam, TwoStepRecurrence) {
  const double g = 0.7, lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double theta = 1.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 2; ++t) {
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    theta -= lr * mh / (std::sqrt(vh) + eps);
  }
  std::vector<double> p{1.0}, grad{g};
  auto s = nn::AdamState::for_size(1);
  nn::adam_update(p, grad, s, lr);
  nn::adam_update(p, grad, s, lr);
  EXPECT_NEAR(p[0], theta, 1e-15);
  EXPECT_EQ(s.t, 2);
}

TEST(Fit, ZeroTargetsWithZeroProjectionStayAtZeroLoss) {
  auto cfg = tiny(4, 3);
  cfg.epochs = 3;
  cfg.batch_size = 2;
  auto m = nn::init_weights(cfg, 2, 1);
  m.projection.setZero();
  auto samples = oracle::random_samples(6, 4, 2, 4);
  for (auto& s : samples) s.target = 0.0;
  const auto r = nn::fit(m, samples);
  ASSERT_EQ(r.train_loss.size(), 3u);
  for (double l : r.train_loss) EXPECT_EQ(l, 0.0);
}

TEST(Fit, DescendsAndIsDeterministic) {
  // Linear trend, windows of the series predicting the next value.
  std::vector<WindowedSample> samples;
  const int T = 4;
  for (int i = 0; i < 40; ++i) {
    WindowedSample s;
    s.input.resize(T, 1);
    for (int t = 0; t < T; ++t) s.input(t, 0) = 0.05 * (i + t);
    s.target = 0.05 * (i + T);
    s.target_index = static_cast<std::size_t>(i + T);
    samples.push_back(s);
  }
  auto cfg = tiny(T, 6);
  cfg.epochs = 30;
  cfg.batch_size = 8;
  const auto init = nn::init_weights(cfg, 1, 7);
  const double before = oracle::mse(init, samples);
  const auto a = nn::fit(init, samples, samples);
  const auto b = nn::fit(init, samples, samples);
  EXPECT_LT(oracle::mse(a.model, samples), before);
  EXPECT_EQ(a.train_loss, b.train_loss);
  EXPECT_EQ(a.validation_maape, b.validation_maape);
  EXPECT_EQ(nn::flatten(a.model), nn::flatten(b.model));
  EXPECT_EQ(a.validation_maape.size(), 30u);
  EXPECT_THROW(nn::fit(init, std::vector<WindowedSample>{}), Error);
}

TEST(TrainSteps, ReducesLoss) {
  auto cfg = tiny(4, 3);
  auto m = nn::init_weights(cfg, 2, 1);
  const auto samples = oracle::random_samples(10, 4, 2, 4);
  auto adam = nn::AdamState::for_size(nn::parameter_count(m));
  const double before = oracle::mse(m, samples);
  nn::train_steps(m, adam, samples, 20);
  EXPECT_LT(oracle::mse(m, samples), before);
  EXPECT_EQ(adam.t, 20);
}

TEST(ModelIo, RoundTripIsBitExact) {
  for (bool bias : {false, true}) {
    auto m = nn::init_weights(tiny(5, 4, 2, bias), 3, 77);
    if (bias) randomize_biases(m, 1);
    m.projection(0) = 0.1 + 0.2;  // not representable in short decimal form
    const auto back = nn::model_from_json(nn::model_to_json(m));
    EXPECT_EQ(back.config, m.config);
    EXPECT_EQ(back.input_size, m.input_size);
    EXPECT_EQ(nn::flatten(back), nn::flatten(m));

    const auto path = std::filesystem::temp_directory_path() / "dfocast_model_io_test.json";
    nn::save_model(m, path);
    EXPECT_EQ(nn::flatten(nn::load_model(path)), nn::flatten(m));
    std::filesystem::remove(path);
  }
}

TEST(ModelIo, RejectsForeignDocuments) {
  try {
    nn::model_from_json(R"({"format":"other"})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Schema);
  }
  EXPECT_THROW(nn::load_model("/nonexistent/model.json"), Error);
}
