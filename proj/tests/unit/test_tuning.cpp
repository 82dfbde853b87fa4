#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dfocast/error.hpp"
#include "dfocast/synthetic.hpp"
#include "dfocast/tuning.hpp"

namespace tn = dfocast::tuning;
namespace data = dfocast::data;
namespace synthetic = dfocast::synthetic;
using dfocast::Error;
using dfocast::ErrorKind;

namespace {

constexpr double kPi2 = std::numbers::pi / 2;

tn::HyperparameterSpace fixed_space(int window = 4) {
  tn::HyperparameterSpace s;
  s.epochs = {10};
  s.batch_size = {8};
  s.hidden = {8};
  s.window = {window};
  s.learning_rate_grid = {1e-2};
  s.learning_rate_index = {0};
  s.layers = {1};
  s.ensemble_factor = {1};
  return s;
}

tn::TuningProblem feature_problem(std::uint64_t seed, std::size_t length = 1000) {
  synthetic::FeatureSpec fs;
  fs.seed = seed;
  fs.length = length;
  const auto split = data::split_dataset(synthetic::feature_dataset(fs));
  tn::TuningProblem p;
  p.train = split.train;
  p.validation = split.validation;
  p.target_column = "y";
  p.feature_columns = {"x0", "x1", "x2", "x3", "x4"};
  p.base_seed = seed;
  return p;
}

}  // namespace

TEST(Mask, FromVector) {
  EXPECT_EQ(tn::mask_from_vector({0.7, 0.2, 0.5}, {}).to_string(), "[1,0,1]");
  EXPECT_EQ(tn::mask_from_vector({0.4, 0.4, 0.4, 0.4}, {0}).to_string(), "[1,0,0,0]");
  EXPECT_EQ(tn::mask_from_vector({0.9, 0.9}, {}).count(), 2u);
  try {
    tn::mask_from_vector({0.1, 0.2}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyMask);
  }
}

TEST(Mask, SelectedFeaturesKeepDatasetOrder) {
  const std::vector<std::string> names{"a", "b", "c", "d"};
  EXPECT_EQ(tn::selected_features(names, tn::mask_from_vector({0.6, 0, 1, 0.5}, {})),
            (std::vector<std::string>{"a", "c", "d"}));
}

TEST(Space, Validation) {
  tn::HyperparameterSpace s;
  EXPECT_NO_THROW(s.validate());
  s.window = {12, 6};
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.ensemble_factor = {};
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.learning_rate_index = {0, 4};
  EXPECT_THROW(s.validate(), Error);
}

TEST(Objective, DeterministicAndBounded) {
  auto space = fixed_space();
  space.ensemble_factor = {1, 2};
  tn::TuningObjective a(feature_problem(1, 400), space, {}, true);
  tn::TuningObjective b(feature_problem(1, 400), space, {}, true);
  const std::vector<double> point{2, 1, 0, 1, 0, 0};
  const double va = a(point);
  EXPECT_EQ(va, b(point));
  EXPECT_EQ(va, a(point));
  EXPECT_EQ(a.trainings(), 1u);
  EXPECT_GE(va, 0.0);
  EXPECT_LE(va, kPi2);
}

TEST(Objective, InfeasibleWindowScoresUpperBound) {
  auto problem = feature_problem(1, 100);  // 60 training rows
  auto space = fixed_space();
  space.window = {4, 80};
  tn::TuningObjective obj(problem, space, {}, false);
  EXPECT_EQ(obj({80}), kPi2);
  ASSERT_FALSE(obj.log().empty());
  EXPECT_NE(obj.log().back().find("window"), std::string::npos);
  EXPECT_LT(obj({4}), kPi2);
}

TEST(Objective, EmptyMaskScoresUpperBound) {
  tn::TuningObjective obj(feature_problem(1, 200), fixed_space(), {}, true);
  EXPECT_EQ(obj({0, 0, 0, 0, 0}), kPi2);
}

TEST(Objective, DroppingInformativeFeatureHurts) {
  int worse = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    tn::TuningObjective obj(feature_problem(seed), fixed_space(), {}, true);
    const double all = obj({1, 1, 1, 1, 1});
    const double without = obj({0, 1, 1, 1, 1});
    worse += without > all;
  }
  EXPECT_GE(worse, 3);
}

TEST(Tune, SingleFeasiblePoint) {
  dfocast::sdfo::SdfoConfig cfg;
  cfg.budget = 5;
  const auto r = tn::tune_hyperparameters(feature_problem(2, 200), fixed_space(), cfg, 1);
  EXPECT_EQ(r.trace.history.size(), 1u);
  EXPECT_EQ(r.trainings, 1u);
  EXPECT_EQ(r.best.model.hidden, 8);
  EXPECT_EQ(r.best.ensemble_factor, 1);
}

TEST(Tune, PicksExhaustiveBestEnsembleFactor) {
  // Period-2 series; the optimizer must agree with brute force over EF.
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    synthetic::SeasonalSpec ss;
    ss.length = 300;
    ss.period = 2;
    ss.seed = seed;
    const auto split = data::split_dataset(synthetic::seasonal_series(ss));
    tn::TuningProblem p;
    p.train = split.train;
    p.validation = split.validation;
    p.target_column = "value";
    p.feature_columns = {"value"};
    p.base_seed = seed;
    auto space = fixed_space(4);
    space.ensemble_factor = {1, 2};
    tn::TuningObjective brute(p, space, {}, false);
    const double ef1 = brute({1}), ef2 = brute({2});
    dfocast::sdfo::SdfoConfig cfg;
    cfg.budget = 10;
    const auto r = tn::tune_hyperparameters(p, space, cfg, seed);
    agree += r.best.ensemble_factor == (ef2 < ef1 ? 2 : 1);
    EXPECT_EQ(r.best_value, std::min(ef1, ef2));
    EXPECT_LE(r.trace.history.size(), static_cast<std::size_t>(cfg.budget) + 2);
  }
  EXPECT_GE(agree, 4);
}

TEST(Select, ForcedSingleFeatureReducesToTuning) {
  auto p = feature_problem(3, 200);
  p.feature_columns = {"x0"};
  auto space = fixed_space();
  space.window = {2, 4};
  dfocast::sdfo::SdfoConfig cfg;
  cfg.budget = 4;
  const auto sel = tn::select_features(p, space, cfg, {0}, 1);
  const auto tun = tn::tune_hyperparameters(p, space, cfg, 1);
  EXPECT_EQ(sel.mask.to_string(), "[1]");
  EXPECT_EQ(sel.search_space.size(), 1u);
  EXPECT_EQ(sel.best_value, tun.best_value);
  EXPECT_EQ(sel.best.model.window, tun.best.model.window);
}

TEST(Select, NeverReadsTheTestSegment) {
  // The problem type carries no test rows; poisoning them cannot matter.
  synthetic::FeatureSpec fs;
  fs.length = 300;
  auto ds = synthetic::feature_dataset(fs);
  auto run = [&](const data::TimeSeriesDataset& d) {
    const auto split = data::split_dataset(d);
    tn::TuningProblem p;
    p.train = split.train;
    p.validation = split.validation;
    p.target_column = "y";
    p.feature_columns = {"x0", "x1", "x2", "x3", "x4"};
    dfocast::sdfo::SdfoConfig cfg;
    cfg.budget = 3;
    return tn::select_features(p, fixed_space(), cfg, {}, 1);
  };
  std::vector<std::string> names = ds.names();
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < ds.column_count(); ++c) {
    auto v = std::vector<double>(ds.column(c).begin(), ds.column(c).end());
    for (std::size_t i = 240; i < v.size(); ++i) v[i] = 1e6;
    cols.push_back(v);
  }
  const auto clean = run(ds);
  const auto poisoned = run(data::TimeSeriesDataset(names, cols));
  EXPECT_EQ(clean.best_value, poisoned.best_value);
  EXPECT_EQ(clean.mask.to_string(), poisoned.mask.to_string());
}

TEST(Evaluate, ValidationScoreMatchesObjective) {
  const auto p = feature_problem(4, 400);
  auto space = fixed_space();
  space.ensemble_factor = {1, 2, 3};
  tn::TuningObjective obj(p, space, {}, true);
  const std::vector<double> point{3, 1, 0, 1, 1, 0};
  const double v = obj(point);
  const auto split = data::split_dataset(synthetic::feature_dataset([] {
    synthetic::FeatureSpec fs;
    fs.seed = 4;
    fs.length = 400;
    return fs;
  }()));
  const auto score = tn::evaluate_configuration(p, split.test, obj.decode_config(point),
                                                obj.decode_mask(point));
  EXPECT_EQ(score.validation.report.maape, v);
  EXPECT_GT(score.test.samples.size(), 0u);
}
