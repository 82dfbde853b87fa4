#include "dfocast/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "dfocast/error.hpp"

namespace dfocast::tuning {

void HyperparameterSpace::validate() const {
  const std::vector<const std::vector<int>*> sets{&epochs, &batch_size, &hidden, &window,
                                                  &learning_rate_index, &layers,
                                                  &ensemble_factor};
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& s = *sets[i];
    if (s.empty()) {
      throw Error(ErrorKind::InvalidParameter,
                  "feasible set for " + parameter_names()[i] + " is empty");
    }
    if (!std::is_sorted(s.begin(), s.end()) ||
        std::adjacent_find(s.begin(), s.end()) != s.end()) {
      throw Error(ErrorKind::InvalidParameter,
                  "feasible set for " + parameter_names()[i] + " must be strictly increasing");
    }
    if (s.front() < (i == 4 ? 0 : 1)) {
      throw Error(ErrorKind::InvalidParameter,
                  "feasible set for " + parameter_names()[i] + " has out-of-range values");
    }
  }
  if (learning_rate_index.back() >= static_cast<int>(learning_rate_grid.size())) {
    throw Error(ErrorKind::InvalidParameter, "learning_rate_index exceeds the learning-rate grid");
  }
  for (double lr : learning_rate_grid) {
    if (!(lr > 0.0)) throw Error(ErrorKind::InvalidParameter, "learning rates must be positive");
  }
}

std::size_t FeatureMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

std::string FeatureMask::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (i) out += ',';
    out += bits[i] ? '1' : '0';
  }
  return out + "]";
}

FeatureMask mask_from_vector(const std::vector<double>& coords,
                             const std::vector<std::size_t>& forced_include) {
  FeatureMask mask;
  mask.forced_include = forced_include;
  mask.bits.resize(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) mask.bits[i] = coords[i] >= 0.5;
  for (std::size_t i : forced_include) {
    if (i >= coords.size()) throw Error(ErrorKind::InvalidInput, "forced feature index out of range");
    mask.bits[i] = true;
  }
  if (mask.count() == 0) throw Error(ErrorKind::EmptyMask, "feature mask selects nothing");
  return mask;
}

namespace {

const std::vector<int>& parameter_set(const HyperparameterSpace& s, std::size_t i) {
  switch (i) {
    case 0: return s.epochs;
    case 1: return s.batch_size;
    case 2: return s.hidden;
    case 3: return s.window;
    case 4: return s.learning_rate_index;
    case 5: return s.layers;
    default: return s.ensemble_factor;
  }
}

}  // namespace

TuningObjective::TuningObjective(TuningProblem problem, HyperparameterSpace space,
                                 std::vector<std::size_t> forced_include, bool select_features)
    : problem_(std::move(problem)), space_(std::move(space)), forced_(std::move(forced_include)) {
  space_.validate();
  if (problem_.feature_columns.empty()) {
    throw Error(ErrorKind::InvalidInput, "tuning needs at least one feature column");
  }
  if (problem_.train.rows() == 0 || problem_.validation.rows() == 0) {
    throw Error(ErrorKind::InvalidInput, "training and validation segments must be non-empty");
  }
  for (std::size_t i : forced_) {
    if (i >= problem_.feature_columns.size()) {
      throw Error(ErrorKind::InvalidInput, "forced feature index out of range");
    }
  }
  for (std::size_t p = 0; p < parameter_names().size(); ++p) {
    const auto& values = parameter_set(space_, p);
    if (values.size() < 2) continue;
    hyper_dims_.push_back(p);
    search_space_.dims.push_back({parameter_names()[p], sdfo::IntegerEncoding{values}});
  }
  if (select_features) {
    for (std::size_t q = 0; q < problem_.feature_columns.size(); ++q) {
      if (std::find(forced_.begin(), forced_.end(), q) != forced_.end()) continue;
      free_features_.push_back(q);
      search_space_.dims.push_back({"use_" + problem_.feature_columns[q], std::nullopt});
    }
  }
}

TunedConfig TuningObjective::decode_config(const std::vector<double>& decoded) const {
  std::vector<int> values(parameter_names().size());
  for (std::size_t p = 0; p < values.size(); ++p) values[p] = parameter_set(space_, p).front();
  for (std::size_t d = 0; d < hyper_dims_.size(); ++d) {
    values[hyper_dims_[d]] = static_cast<int>(decoded.at(d));
  }
  TunedConfig c;
  c.model.epochs = values[0];
  c.model.batch_size = values[1];
  c.model.hidden = values[2];
  c.model.window = values[3];
  c.learning_rate_index = values[4];
  c.model.learning_rate = space_.learning_rate_grid.at(static_cast<std::size_t>(values[4]));
  c.model.layers = values[5];
  c.ensemble_factor = values[6];
  c.model.horizon = problem_.horizon;
  c.model.seed = problem_.base_seed;
  c.model.use_bias = problem_.use_bias;
  return c;
}

FeatureMask TuningObjective::decode_mask(const std::vector<double>& decoded) const {
  std::vector<double> coords(problem_.feature_columns.size(), 1.0);
  for (std::size_t k = 0; k < free_features_.size(); ++k) {
    coords[free_features_[k]] = decoded.at(hyper_dims_.size() + k);
  }
  return mask_from_vector(coords, forced_);
}

double TuningObjective::operator()(const std::vector<double>& decoded) {
  const TunedConfig config = decode_config(decoded);
  FeatureMask mask;
  try {
    mask = decode_mask(decoded);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyMask) throw;
    log_.push_back("empty feature mask scored as the upper bound");
    return problem_.upper_bound;
  }
  return evaluate(config, mask);
}

std::vector<std::string> selected_features(const std::vector<std::string>& features,
                                           const FeatureMask& mask) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (mask.bits.at(i)) out.push_back(features[i]);
  }
  return out;
}

double TuningObjective::evaluate(const TunedConfig& config, const FeatureMask& mask) {
  std::vector<int> key{config.model.epochs, config.model.batch_size, config.model.hidden,
                       config.model.window, config.learning_rate_index, config.model.layers,
                       config.ensemble_factor};
  for (bool b : mask.bits) key.push_back(b ? 1 : 0);
  if (auto hit = memo_.find(key); hit != memo_.end()) return hit->second;

  auto infeasible = [&](const std::string& reason) {
    log_.push_back(reason);
    memo_.emplace(key, problem_.upper_bound);
    return problem_.upper_bound;
  };

  const auto need = static_cast<std::size_t>(config.model.window + config.model.horizon);
  if (problem_.train.rows() < need || problem_.validation.rows() < need) {
    return infeasible("window " + std::to_string(config.model.window) + " + horizon " +
                      std::to_string(config.model.horizon) + " exceeds a segment length");
  }
  const auto features = selected_features(problem_.feature_columns, mask);
  const auto train = data::make_windows(problem_.train, config.model.window,
                                        config.model.horizon, problem_.target_column, features);
  const auto valid = data::make_windows(problem_.validation, config.model.window,
                                        config.model.horizon, problem_.target_column, features);
  const auto ef = static_cast<std::size_t>(config.ensemble_factor);
  resampling::ResamplingPlan plan;
  if (problem_.mode == resampling::Mode::Additive) {
    if (ef > train.size() || ef > valid.size()) {
      return infeasible("ensemble factor " + std::to_string(ef) + " exceeds a sample pool");
    }
    plan = resampling::additive_plan(train.size(), valid.size(), ef, problem_.base_seed);
  } else {
    plan = resampling::bagging_sample(train.size(), ef, problem_.base_seed);
  }
  const auto model = ensemble::train_ensemble(train, plan, config.model, {problem_.threads});
  const auto predicted = ensemble::predict_ensemble(model, valid).predicted;
  const auto actual = ensemble::targets_of(valid);
  double value = metrics::maape({actual, predicted});
  if (!std::isfinite(value)) {
    return infeasible("non-finite validation error");
  }
  memo_.emplace(key, value);
  return value;
}

TuningObjective make_tuning_objective(const TuningProblem& problem,
                                      const HyperparameterSpace& space) {
  return TuningObjective(problem, space, {}, false);
}

namespace {

TuningResult run(TuningObjective& objective, const sdfo::SdfoConfig& sdfo_config,
                 std::uint64_t seed) {
  TuningResult result;
  result.search_space = objective.search_space();
  if (result.search_space.size() == 0) {
    // Single feasible point: nothing to search.
    const std::vector<double> none;
    result.best = objective.decode_config(none);
    result.mask = objective.decode_mask(none);
    result.best_value = objective(none);
    sdfo::Evaluation e;
    e.value = result.best_value;
    e.point = Eigen::VectorXd(0);
    e.accepted = true;
    result.trace.history.push_back(e);
    result.trace.best_value = result.best_value;
    result.trace.best_trace.push_back(result.best_value);
  } else {
    sdfo::SdfoConfig cfg = sdfo_config;
    result.trace = sdfo::minimize(
        [&](const std::vector<double>& decoded) { return objective(decoded); },
        result.search_space, cfg, seed);
    result.best = objective.decode_config(result.trace.best_decoded);
    result.mask = objective.decode_mask(result.trace.best_decoded);
    result.best_value = result.trace.best_value;
  }
  result.trainings = objective.trainings();
  result.log = objective.log();
  return result;
}

}  // namespace

TuningResult tune_hyperparameters(const TuningProblem& problem, const HyperparameterSpace& space,
                                  const sdfo::SdfoConfig& sdfo_config, std::uint64_t seed) {
  TuningObjective objective(problem, space, {}, false);
  return run(objective, sdfo_config, seed);
}

TuningResult select_features(const TuningProblem& problem, const HyperparameterSpace& space,
                             const sdfo::SdfoConfig& sdfo_config,
                             const std::vector<std::size_t>& forced_include,
                             std::uint64_t seed) {
  if (problem.feature_columns.empty()) {
    throw Error(ErrorKind::InvalidInput, "feature selection needs at least one feature");
  }
  TuningObjective objective(problem, space, forced_include, true);
  return run(objective, sdfo_config, seed);
}

ConfigurationScore evaluate_configuration(const TuningProblem& problem,
                                          const data::TimeSeriesDataset& test,
                                          const TunedConfig& config, const FeatureMask& mask,
                                          double huber_delta) {
  const auto features = selected_features(problem.feature_columns, mask);
  const int T = config.model.window;
  const int h = config.model.horizon;
  ConfigurationScore score;
  const auto train = data::make_windows(problem.train, T, h, problem.target_column, features);
  score.validation.samples =
      data::make_windows(problem.validation, T, h, problem.target_column, features);
  score.test.samples = data::make_windows(test, T, h, problem.target_column, features);

  const auto ef = static_cast<std::size_t>(config.ensemble_factor);
  resampling::ResamplingPlan plan =
      problem.mode == resampling::Mode::Additive
          ? resampling::additive_plan(train.size(), score.validation.samples.size(), ef,
                                      problem.base_seed)
          : resampling::bagging_sample(train.size(), ef, problem.base_seed);
  score.model = ensemble::train_ensemble(train, plan, config.model, {problem.threads});

  auto score_segment = [&](SegmentScore& seg) {
    ensemble::EnsembleModel view = score.model;
    view.plan = resampling::with_eval_size(view.plan, seg.samples.size());
    seg.prediction = ensemble::predict_ensemble(view, seg.samples);
    const auto actual = ensemble::targets_of(seg.samples);
    seg.report = metrics::error_report({actual, seg.prediction.predicted}, huber_delta);
  };
  score_segment(score.validation);
  score_segment(score.test);
  return score;
}

}  // namespace dfocast::tuning
