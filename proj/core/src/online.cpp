#include "dfocast/online.hpp"

#include <cmath>
#include <ostream>

#include "dfocast/error.hpp"
#include "dfocast/text.hpp"

namespace dfocast::online {

void OnlineRunConfig::validate() const {
  if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "warmup_fraction must lie in (0, 1)");
  }
  if (update_steps < 0) throw Error(ErrorKind::InvalidParameter, "update_steps must be >= 0");
  if (update_window < 1) throw Error(ErrorKind::InvalidParameter, "update_window must be >= 1");
}

namespace {

// All online-phase reads go through here so they can be audited.
class ObservedRows {
 public:
  ObservedRows(const data::TimeSeriesDataset& ds, const std::string& target,
               const std::vector<std::string>& features, std::vector<AccessEvent>* log)
      : target_(ds.column(target)), log_(log) {
    for (const auto& f : features) features_.push_back(ds.column(f));
  }

  Eigen::MatrixXd window(std::size_t step, std::size_t begin, std::size_t length) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(length),
                      static_cast<Eigen::Index>(features_.size()));
    for (std::size_t t = 0; t < length; ++t) {
      record(step, AccessEvent::Kind::Predict, begin + t);
      for (std::size_t q = 0; q < features_.size(); ++q) {
        m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(q)) = features_[q][begin + t];
      }
    }
    return m;
  }

  double reveal(std::size_t step) {
    record(step, AccessEvent::Kind::Reveal, step);
    return target_[step];
  }

 private:
  void record(std::size_t step, AccessEvent::Kind kind, std::size_t row) {
    if (log_) log_->push_back({step, kind, row});
  }

  std::span<const double> target_;
  std::vector<std::span<const double>> features_;
  std::vector<AccessEvent>* log_;
};

}  // namespace

OnlineResult run_online(const data::TimeSeriesDataset& dataset, const std::string& target_column,
                        const std::vector<std::string>& feature_columns,
                        nn::Seq2SeqConfig model_config, const OnlineRunConfig& run_config,
                        const StepCallback& on_step, std::vector<AccessEvent>* access_log) {
  run_config.validate();
  model_config.horizon = 1;
  model_config.validate();
  const std::size_t n = dataset.rows();
  const auto warm = static_cast<std::size_t>(std::floor(run_config.warmup_fraction * static_cast<double>(n)));
  const auto T = static_cast<std::size_t>(model_config.window);
  if (warm < T + 1 || warm >= n) {
    throw Error(ErrorKind::InvalidInput,
                "not enough rows for a warm-up fit with window " + std::to_string(T) +
                    " and a non-empty online segment");
  }

  std::vector<WindowedSample> history =
      data::make_windows(dataset.slice(0, warm), model_config.window, 1, target_column,
                         feature_columns);
  nn::FitResult fitted = nn::fit(
      nn::init_weights(model_config, static_cast<Eigen::Index>(feature_columns.size()),
                       model_config.seed),
      history);

  OnlineResult result;
  result.warmup_loss = fitted.train_loss;
  nn::Seq2SeqModel model = std::move(fitted.model);
  nn::AdamState adam = std::move(fitted.adam);

  ObservedRows rows(dataset, target_column, feature_columns, access_log);
  std::vector<double> actual, predicted;
  double atan_sum = 0.0;
  for (std::size_t t = warm; t < n; ++t) {
    WindowedSample sample;
    sample.input = rows.window(t, t - T, T);
    const double prediction = nn::predict(model, sample.input);
    const double truth = rows.reveal(t);
    sample.target = truth;
    sample.target_index = t;

    const double err = std::abs(truth - prediction);
    if (err != 0.0) atan_sum += std::atan2(err, std::abs(truth));
    actual.push_back(truth);
    predicted.push_back(prediction);
    const OnlineStep step{t, truth, prediction, atan_sum / static_cast<double>(actual.size())};
    result.steps.push_back(step);
    if (on_step) on_step(step);

    history.push_back(std::move(sample));
    if (run_config.update_steps > 0) {
      const std::size_t w = std::min(history.size(), static_cast<std::size_t>(run_config.update_window));
      nn::train_steps(model, adam,
                      std::span<const WindowedSample>(history.data() + history.size() - w, w),
                      run_config.update_steps);
    }
  }
  result.report = metrics::error_report({actual, predicted});
  result.final_model = std::move(model);
  return result;
}

StreamingCsvWriter::StreamingCsvWriter(std::ostream& out) : out_(&out) {
  *out_ << "t,truth,prediction,running_maape\n";
  out_->flush();
}

void StreamingCsvWriter::operator()(const OnlineStep& step) {
  *out_ << step.index << ',' << format_double(step.truth) << ','
        << format_double(step.prediction) << ',' << format_double(step.running_maape) << '\n';
  out_->flush();
}

}  // namespace dfocast::online
