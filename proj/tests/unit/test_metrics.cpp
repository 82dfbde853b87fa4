#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dfocast/error.hpp"
#include "dfocast/metrics.hpp"

namespace m = dfocast::metrics;
using dfocast::Error;
using dfocast::ErrorKind;

namespace {

double call(double (*fn)(const m::PredictionBatch&), std::vector<double> a, std::vector<double> p) {
  return fn({a, p});
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorKind::Io;
}

}  // namespace

TEST(Mae, Examples) {
  EXPECT_DOUBLE_EQ(call(m::mae, {1, -1}, {0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(call(m::mae, {3, 7}, {3, 7}), 0.0);
  EXPECT_DOUBLE_EQ(call(m::mae, {0, 2, 4}, {1, 2, 1}), 4.0 / 3.0);
}

TEST(Rmse, Examples) {
  EXPECT_DOUBLE_EQ(call(m::rmse, {0, 0}, {1, -1}), 1.0);
  EXPECT_DOUBLE_EQ(call(m::rmse, {5, 6}, {5, 6}), 0.0);
  EXPECT_DOUBLE_EQ(call(m::rmse, {0, 10}, {1, 9}), 1.0);
}

TEST(Nrmse, Examples) {
  EXPECT_DOUBLE_EQ(call(m::nrmse, {0, 10}, {1, 9}), 10.0);
  EXPECT_DOUBLE_EQ(call(m::nrmse, {1, 4}, {1, 4}), 0.0);
  // Hand expansion: residuals (-2, 0, 2), mean square 8/3, range 2.
  const double expected = 100.0 * std::sqrt((4.0 + 0.0 + 4.0) / 3.0) / (2.0 - 0.0);
  EXPECT_NEAR(call(m::nrmse, {0, 1, 2}, {2, 1, 0}), expected, 1e-12);
  EXPECT_NEAR(expected, 81.65, 5e-3);
}

TEST(Nrmse, ConstantActualsAreDegenerate) {
  EXPECT_EQ(kind_of([] { call(m::nrmse, {2, 2}, {1, 3}); }), ErrorKind::DegenerateRange);
}

TEST(Maape, Examples) {
  EXPECT_NEAR(call(m::maape, {1, 2}, {2, 4}), std::numbers::pi / 4, 1e-15);
  EXPECT_DOUBLE_EQ(call(m::maape, {0}, {5}), std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(call(m::maape, {0, 3}, {0, 3}), 0.0);
}

TEST(Huber, Examples) {
  EXPECT_DOUBLE_EQ(m::huber({std::vector<double>{0.5}, std::vector<double>{0.0}}, 1.0), 0.125);
  EXPECT_DOUBLE_EQ(m::huber({std::vector<double>{2.0}, std::vector<double>{0.0}}, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(m::huber({std::vector<double>{1.0}, std::vector<double>{1.0}}, 1.0), 0.0);
  EXPECT_EQ(kind_of([] { m::huber({std::vector<double>{1.0}, std::vector<double>{1.0}}, 0.0); }),
            ErrorKind::InvalidParameter);
}

TEST(Metrics, EmptyAndMismatchedBatchesAreRejected) {
  EXPECT_EQ(kind_of([] { call(m::mae, {}, {}); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { call(m::rmse, {1, 2}, {1}); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { call(m::maape, {}, {}); }), ErrorKind::InvalidInput);
}

TEST(ErrorReport, BundlesAllMetrics) {
  std::vector<double> a{1, 2}, p{2, 4};
  auto r = m::error_report({a, p});
  EXPECT_NEAR(r.maape, std::numbers::pi / 4, 1e-15);
  EXPECT_DOUBLE_EQ(r.mae, 1.5);

  std::vector<double> a2{0, 10}, p2{1, 9};
  r = m::error_report({a2, p2});
  EXPECT_DOUBLE_EQ(r.nrmse, 10.0);
  EXPECT_DOUBLE_EQ(r.rmse, 1.0);

  r = m::error_report({a2, a2});
  EXPECT_EQ(r.maape + r.nrmse + r.mae + r.rmse + r.huber, 0.0);
}

TEST(ErrorReport, ExactForecastOfConstantSeriesIsZero) {
  std::vector<double> a{4, 4, 4};
  const auto r = m::error_report({a, a});
  EXPECT_EQ(r.nrmse, 0.0);
  std::vector<double> p{4, 5, 4};
  EXPECT_THROW(m::error_report({a, p}), Error);
}

// Property checks over random batches, zeros included.
TEST(MetricsProperties, RandomBatches) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 3.0);
  std::uniform_int_distribution<int> len(1, 20);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = len(rng);
    std::vector<double> a(n), p(n);
    for (int i = 0; i < n; ++i) {
      a[i] = (rng() % 5 == 0) ? 0.0 : normal(rng);
      p[i] = (rng() % 7 == 0) ? a[i] : normal(rng);
    }
    const double maape = m::maape({a, p});
    ASSERT_GE(maape, 0.0);
    ASSERT_LE(maape, std::numbers::pi / 2);

    const double k = scale(rng);
    std::vector<double> ka(n), kp(n);
    for (int i = 0; i < n; ++i) {
      ka[i] = k * a[i];
      kp[i] = k * p[i];
    }
    EXPECT_NEAR(m::maape({ka, kp}), maape, 1e-12);
    EXPECT_NEAR(m::mae({ka, kp}), k * m::mae({a, p}), 1e-9 * k * (1 + m::mae({a, p})));
    EXPECT_NEAR(m::rmse({ka, kp}), k * m::rmse({a, p}), 1e-9 * k * (1 + m::rmse({a, p})));
    if (n > 1 && *std::max_element(a.begin(), a.end()) > *std::min_element(a.begin(), a.end())) {
      EXPECT_NEAR(m::nrmse({ka, kp}), m::nrmse({a, p}), 1e-9 * (1 + m::nrmse({a, p})));
    }

    double half_mse = 0.0;
    for (int i = 0; i < n; ++i) half_mse += 0.5 * (a[i] - p[i]) * (a[i] - p[i]);
    half_mse /= n;
    for (double delta : {0.1, 1.0, 5.0}) {
      EXPECT_LE(m::huber({a, p}, delta), half_mse + 1e-12);
    }
    const bool equal = a == p;
    EXPECT_EQ(m::mae({a, p}) == 0.0, equal);
    EXPECT_EQ(maape == 0.0, equal);
  }
}
