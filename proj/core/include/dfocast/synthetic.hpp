#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dfocast/data.hpp"

namespace dfocast::synthetic {

/// level + slope * t + amplitude * sin(2 pi t / period) + noise, with the noise
/// standard deviation chosen so that var(seasonal) / var(noise) == snr.
/// Single column "value".
struct SeasonalSpec {
  std::size_t length = 1440;
  int period = 24;
  double amplitude = 3.0;
  double snr = 4.0;
  double level = 10.0;
  double slope = 0.0;
  std::uint64_t seed = 1;
};

data::TimeSeriesDataset seasonal_series(const SeasonalSpec& spec);

/// Features x0..x{n-1}, each a stationary AR(1) around `feature_mean`, and a
/// target y_t = level + sum_k w_k (x_{k,t-1} - mean) + noise that depends
/// only on the informative features.
struct FeatureSpec {
  std::size_t length = 400;
  std::size_t features = 5;
  std::vector<std::size_t> informative{0, 2};
  std::vector<double> weights{1.5, -1.0};
  double ar = 0.9;
  double feature_mean = 5.0;
  double level = 10.0;
  double noise = 0.1;
  std::uint64_t seed = 1;
};

data::TimeSeriesDataset feature_dataset(const FeatureSpec& spec);

}  // namespace dfocast::synthetic
