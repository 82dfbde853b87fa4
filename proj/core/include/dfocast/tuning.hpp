#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "dfocast/data.hpp"
#include "dfocast/ensemble.hpp"
#include "dfocast/metrics.hpp"
#include "dfocast/nn.hpp"
#include "dfocast/resampling.hpp"
#include "dfocast/sdfo.hpp"

namespace dfocast::tuning {

/// Integer feasible sets for every tuned hyperparameter. The learning rate is
/// tuned through an index into `learning_rate_grid`. Sets with a single value
/// are fixed and do not become optimizer coordinates.
struct HyperparameterSpace {
  std::vector<int> epochs{10, 25, 50, 100};
  std::vector<int> batch_size{8, 16, 32, 64};
  std::vector<int> hidden{8, 16, 32, 64};
  std::vector<int> window{6, 12, 24, 48};
  std::vector<int> learning_rate_index{0, 1, 2, 3};
  std::vector<int> layers{1, 2, 3};
  std::vector<int> ensemble_factor{1, 2, 3, 4, 5, 6};
  std::vector<double> learning_rate_grid{1e-1, 1e-2, 1e-3, 1e-4};

  void validate() const;
};

/// Parameter names in encoding order.
inline const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names{"epochs", "batch_size", "hidden", "window",
                                              "learning_rate_index", "layers",
                                              "ensemble_factor"};
  return names;
}

struct TunedConfig {
  nn::Seq2SeqConfig model;
  int ensemble_factor = 1;
  int learning_rate_index = 0;
};

struct FeatureMask {
  std::vector<bool> bits;  // dataset feature order
  std::vector<std::size_t> forced_include;

  std::size_t count() const;
  /// "[1,0,1]"
  std::string to_string() const;
};

/// bit i = coords[i] >= 0.5 or i is forced. Throws EmptyMask when nothing is
/// selected.
FeatureMask mask_from_vector(const std::vector<double>& coords,
                             const std::vector<std::size_t>& forced_include);

/// Everything the tuning objective needs besides the candidate point. Only
/// the training and validation segments are ever handed to it.
struct TuningProblem {
  data::TimeSeriesDataset train;
  data::TimeSeriesDataset validation;
  std::string target_column;
  std::vector<std::string> feature_columns;
  int horizon = 1;
  resampling::Mode mode = resampling::Mode::Additive;
  std::uint64_t base_seed = 0;
  bool use_bias = false;
  double upper_bound = std::numbers::pi / 2.0;
  unsigned threads = 1;
};

/// Black box over decoded optimizer coordinates: train an ensemble with the
/// decoded configuration (and feature mask, when selecting features) on the
/// training segment and return its validation MAAPE. Infeasible
/// configurations score `upper_bound`. Results are memoized per decoded
/// configuration and mask.
class TuningObjective {
 public:
  TuningObjective(TuningProblem problem, HyperparameterSpace space,
                  std::vector<std::size_t> forced_include, bool select_features);

  double operator()(const std::vector<double>& decoded);

  const sdfo::SearchSpace& search_space() const { return search_space_; }
  TunedConfig decode_config(const std::vector<double>& decoded) const;
  FeatureMask decode_mask(const std::vector<double>& decoded) const;

  /// Configuration/mask pairs actually trained.
  std::size_t trainings() const { return memo_.size(); }
  const std::vector<std::string>& log() const { return log_; }

  double evaluate(const TunedConfig& config, const FeatureMask& mask);

 private:
  TuningProblem problem_;
  HyperparameterSpace space_;
  std::vector<std::size_t> forced_;
  std::vector<std::size_t> free_features_;  // features with an optimizer coordinate
  std::vector<std::size_t> hyper_dims_;     // parameter index per hyperparameter coordinate
  sdfo::SearchSpace search_space_;
  std::map<std::vector<int>, double> memo_;
  std::vector<std::string> log_;
};

TuningObjective make_tuning_objective(const TuningProblem& problem,
                                      const HyperparameterSpace& space);

struct TuningResult {
  TunedConfig best;
  FeatureMask mask;
  double best_value = 0.0;
  sdfo::SdfoResult trace;
  sdfo::SearchSpace search_space;
  std::size_t trainings = 0;
  std::vector<std::string> log;
};

TuningResult tune_hyperparameters(const TuningProblem& problem, const HyperparameterSpace& space,
                                  const sdfo::SdfoConfig& sdfo_config, std::uint64_t seed);

/// As tune_hyperparameters with one extra [0, 1] coordinate per feature not
/// in `forced_include`; a coordinate >= 0.5 keeps its feature.
TuningResult select_features(const TuningProblem& problem, const HyperparameterSpace& space,
                             const sdfo::SdfoConfig& sdfo_config,
                             const std::vector<std::size_t>& forced_include,
                             std::uint64_t seed);

/// Selected feature names, in dataset order.
std::vector<std::string> selected_features(const std::vector<std::string>& features,
                                           const FeatureMask& mask);

struct SegmentScore {
  std::vector<WindowedSample> samples;
  ensemble::EnsemblePrediction prediction;
  metrics::ErrorReport report;
};

struct ConfigurationScore {
  ensemble::EnsembleModel model;
  SegmentScore validation;
  SegmentScore test;
};

/// Trains once on the problem's training segment and scores the validation
/// segment and `test`. With the same seed the validation score equals the
/// tuning objective's value for this configuration.
ConfigurationScore evaluate_configuration(const TuningProblem& problem,
                                          const data::TimeSeriesDataset& test,
                                          const TunedConfig& config, const FeatureMask& mask,
                                          double huber_delta = metrics::kDefaultHuberDelta);

}  // namespace dfocast::tuning
