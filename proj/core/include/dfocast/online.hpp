#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dfocast/data.hpp"
#include "dfocast/metrics.hpp"
#include "dfocast/nn.hpp"

namespace dfocast::online {

struct OnlineRunConfig {
  double warmup_fraction = 0.8;  // leading share used for the initial fit
  int update_steps = 5;          // ADAM steps after each revealed value
  int update_window = 100;       // most recent samples used by those steps

  void validate() const;
};

/// One row read from the dataset during the online phase.
struct AccessEvent {
  enum class Kind { Predict, Reveal };
  std::size_t step = 0;   // dataset row being forecast
  Kind kind = Kind::Predict;
  std::size_t row = 0;    // row that was read
};

struct OnlineStep {
  std::size_t index = 0;  // dataset row
  double truth = 0.0;
  double prediction = 0.0;
  double running_maape = 0.0;
};

struct OnlineResult {
  std::vector<OnlineStep> steps;
  metrics::ErrorReport report;
  nn::Seq2SeqModel final_model;
  std::vector<double> warmup_loss;
};

using StepCallback = std::function<void(const OnlineStep&)>;

/// Fits one seq2seq network (horizon forced to 1) on the warm-up rows, then
/// walks the remaining rows: forecast row t from rows t-T..t-1, reveal row t,
/// and take `update_steps` ADAM steps on the latest `update_window` samples.
/// Every dataset read in the online phase is appended to `access_log` when
/// given.
OnlineResult run_online(const data::TimeSeriesDataset& dataset, const std::string& target_column,
                        const std::vector<std::string>& feature_columns,
                        nn::Seq2SeqConfig model_config, const OnlineRunConfig& run_config,
                        const StepCallback& on_step = {},
                        std::vector<AccessEvent>* access_log = nullptr);

/// Streams "t,truth,prediction,running_maape" rows, flushing each one.
class StreamingCsvWriter {
 public:
  explicit StreamingCsvWriter(std::ostream& out);
  void operator()(const OnlineStep& step);

 private:
  std::ostream* out_;
};

}  // namespace dfocast::online
