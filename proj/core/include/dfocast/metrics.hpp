#pragma once

#include <span>

namespace dfocast::metrics {

/// Paired observations and forecasts. Both spans must have the same,
/// non-zero length; every metric checks this and throws InvalidInput.
struct PredictionBatch {
  std::span<const double> actual;
  std::span<const double> predicted;
};

struct ErrorReport {
  double maape = 0.0;  // radians, [0, pi/2]
  double nrmse = 0.0;  // percent of the actual range
  double mae = 0.0;
  double rmse = 0.0;
  double huber = 0.0;
};

inline constexpr double kDefaultHuberDelta = 1.0;

double mae(const PredictionBatch& batch);
double rmse(const PredictionBatch& batch);

/// 100 * rmse / (max(actual) - min(actual)). Throws DegenerateRange when the
/// actuals are constant.
double nrmse(const PredictionBatch& batch);

/// Mean arctangent absolute percentage error. A zero actual contributes pi/2
/// unless the forecast is also exactly zero, in which case it contributes 0.
double maape(const PredictionBatch& batch);

double huber(const PredictionBatch& batch, double delta = kDefaultHuberDelta);

ErrorReport error_report(const PredictionBatch& batch,
                         double delta = kDefaultHuberDelta);

}  // namespace dfocast::metrics
