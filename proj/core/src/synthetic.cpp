#include "dfocast/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "dfocast/error.hpp"
#include "dfocast/random.hpp"

namespace dfocast::synthetic {

data::TimeSeriesDataset seasonal_series(const SeasonalSpec& spec) {
  if (spec.period < 1 || spec.length == 0 || !(spec.snr > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "seasonal series needs period >= 1, length > 0, snr > 0");
  }
  auto rng = seeded_engine(spec.seed, 0x5EA5u);
  const double noise_sd = std::sqrt(spec.amplitude * spec.amplitude / 2.0 / spec.snr);
  std::normal_distribution<double> noise(0.0, noise_sd);
  std::vector<double> values(spec.length);
  for (std::size_t t = 0; t < spec.length; ++t) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / spec.period;
    values[t] = spec.level + spec.slope * static_cast<double>(t) +
                spec.amplitude * std::sin(phase) + noise(rng);
  }
  return data::TimeSeriesDataset({"value"}, {std::move(values)});
}

data::TimeSeriesDataset feature_dataset(const FeatureSpec& spec) {
  if (spec.features == 0 || spec.length < 2 || spec.informative.size() != spec.weights.size()) {
    throw Error(ErrorKind::InvalidParameter, "invalid synthetic feature specification");
  }
  for (std::size_t k : spec.informative) {
    if (k >= spec.features) throw Error(ErrorKind::InvalidParameter, "informative index out of range");
  }
  auto rng = seeded_engine(spec.seed, 0xFEA7u);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double innovation = std::sqrt(1.0 - spec.ar * spec.ar);

  std::vector<std::vector<double>> cols(spec.features + 1, std::vector<double>(spec.length));
  std::vector<double> state(spec.features);
  for (double& s : state) s = unit(rng);
  for (std::size_t t = 0; t < spec.length; ++t) {
    for (std::size_t q = 0; q < spec.features; ++q) {
      state[q] = spec.ar * state[q] + innovation * unit(rng);
      cols[q][t] = spec.feature_mean + state[q];
    }
  }
  auto& y = cols.back();
  y[0] = spec.level + spec.noise * unit(rng);
  for (std::size_t t = 1; t < spec.length; ++t) {
    double v = spec.level;
    for (std::size_t k = 0; k < spec.informative.size(); ++k) {
      v += spec.weights[k] * (cols[spec.informative[k]][t - 1] - spec.feature_mean);
    }
    y[t] = v + spec.noise * unit(rng);
  }
  std::vector<std::string> names;
  for (std::size_t q = 0; q < spec.features; ++q) names.push_back("x" + std::to_string(q));
  names.push_back("y");
  return data::TimeSeriesDataset(std::move(names), std::move(cols));
}

}  // namespace dfocast::synthetic
