#include "dfocast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dfocast/error.hpp"

namespace dfocast {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Data: return "data";
    case ErrorKind::DegenerateRange: return "degenerate-range";
    case ErrorKind::DegenerateSeries: return "degenerate-series";
    case ErrorKind::DegenerateStep: return "degenerate-step";
    case ErrorKind::GeometryFailure: return "geometry-failure";
    case ErrorKind::EmptyMask: return "empty-mask";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace dfocast

namespace dfocast::metrics {
namespace {

void check(const PredictionBatch& batch) {
  if (batch.actual.empty()) {
    throw Error(ErrorKind::InvalidInput, "prediction batch is empty");
  }
  if (batch.actual.size() != batch.predicted.size()) {
    throw Error(ErrorKind::InvalidInput,
                "actual and predicted lengths differ");
  }
}

double mean_squared(const PredictionBatch& batch) {
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.actual.size(); ++i) {
    const double r = batch.actual[i] - batch.predicted[i];
    sum += r * r;
  }
  return sum / static_cast<double>(batch.actual.size());
}

}  // namespace

double mae(const PredictionBatch& batch) {
  check(batch);
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.actual.size(); ++i) {
    sum += std::abs(batch.actual[i] - batch.predicted[i]);
  }
  return sum / static_cast<double>(batch.actual.size());
}

double rmse(const PredictionBatch& batch) {
  check(batch);
  return std::sqrt(mean_squared(batch));
}

double nrmse(const PredictionBatch& batch) {
  check(batch);
  const auto [lo, hi] = std::minmax_element(batch.actual.begin(), batch.actual.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    throw Error(ErrorKind::DegenerateRange,
                "nrmse undefined: actual values have zero range");
  }
  return 100.0 * std::sqrt(mean_squared(batch)) / range;
}

double maape(const PredictionBatch& batch) {
  check(batch);
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.actual.size(); ++i) {
    const double err = std::abs(batch.actual[i] - batch.predicted[i]);
    const double denom = std::abs(batch.actual[i]);
    if (err == 0.0) continue;
    // atan2 gives pi/2 for a zero denominator and never exceeds it.
    sum += std::atan2(err, denom);
  }
  return std::min(sum / static_cast<double>(batch.actual.size()),
                  std::numbers::pi / 2.0);
}

double huber(const PredictionBatch& batch, double delta) {
  if (!(delta > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "huber delta must be positive");
  }
  check(batch);
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.actual.size(); ++i) {
    const double r = std::abs(batch.actual[i] - batch.predicted[i]);
    sum += r <= delta ? 0.5 * r * r : delta * (r - 0.5 * delta);
  }
  return sum / static_cast<double>(batch.actual.size());
}

ErrorReport error_report(const PredictionBatch& batch, double delta) {
  ErrorReport report;
  report.maape = maape(batch);
  report.mae = mae(batch);
  report.rmse = rmse(batch);
  report.huber = huber(batch, delta);
  // Constant actuals forecast exactly: zero error, not an undefined range.
  const auto [lo, hi] = std::minmax_element(batch.actual.begin(), batch.actual.end());
  report.nrmse = (*hi == *lo && report.rmse == 0.0) ? 0.0 : nrmse(batch);
  return report;
}

}  // namespace dfocast::metrics
