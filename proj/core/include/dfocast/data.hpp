#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfocast/sample.hpp"

namespace dfocast::data {

/// Named, equal-length numeric columns in ascending time order. Values are
/// kept exactly as read; nothing is normalized or imputed.
class TimeSeriesDataset {
 public:
  TimeSeriesDataset() = default;
  TimeSeriesDataset(std::vector<std::string> names,
                    std::vector<std::vector<double>> columns, double cadence = 1.0,
                    std::size_t offset = 0);

  std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
  std::size_t column_count() const { return columns_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  double cadence() const { return cadence_; }
  /// Row of this dataset's first row within the dataset it was sliced from.
  std::size_t offset() const { return offset_; }

  bool has_column(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;  // throws Schema
  std::span<const double> column(const std::string& name) const;
  std::span<const double> column(std::size_t index) const { return columns_.at(index); }

  /// Rows [begin, end), keeping the offset relative to the original.
  TimeSeriesDataset slice(std::size_t begin, std::size_t end) const;
  /// The named columns, in the order given.
  TimeSeriesDataset select(const std::vector<std::string>& names) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  double cadence_ = 1.0;
  std::size_t offset_ = 0;
};

/// Reads a headed CSV. Only the requested columns are parsed; other columns
/// (timestamps, unused sensors) are ignored. The result holds the feature
/// columns in request order followed by the target if it is not a feature.
TimeSeriesDataset load_csv(const std::filesystem::path& path,
                           const std::string& target_column,
                           const std::vector<std::string>& feature_columns);
TimeSeriesDataset read_csv(std::istream& in, const std::string& target_column,
                           const std::vector<std::string>& feature_columns);

void write_csv(std::ostream& out, const TimeSeriesDataset& ds);

struct SplitSpec {
  double train_fraction = 0.60;
  double validation_fraction = 0.20;
  double test_fraction = 0.20;
};

struct Split {
  TimeSeriesDataset train;
  TimeSeriesDataset validation;
  TimeSeriesDataset test;
};

/// Contiguous train/validation/test segments of floor(f_train N),
/// floor(f_val N) and the remainder.
Split split_dataset(const TimeSeriesDataset& ds, const SplitSpec& spec = {});

/// One sample per start index i = 0..N-T-T': rows i..i+T-1 of the feature
/// columns and the target at row i+T-1+T'.
std::vector<WindowedSample> make_windows(const TimeSeriesDataset& segment, int window,
                                         int horizon, const std::string& target_column,
                                         const std::vector<std::string>& feature_columns);

struct AlignedForecast {
  std::vector<double> actual;
  std::vector<double> predicted;
};

/// b_hat[t + T'] = b[t] for every t with t + T' inside the series.
AlignedForecast persistence_forecast(std::span<const double> series, int horizon);

struct Decomposition {
  std::vector<std::optional<double>> trend;     // absent near the edges
  std::vector<double> seasonal;
  std::vector<std::optional<double>> residual;  // absent where trend is
};

/// Additive decomposition: centered moving average trend (2 x p for even p),
/// zero-mean per-phase seasonal means of the detrended series, and residual.
Decomposition seasonal_decompose(std::span<const double> series, int period);

struct Autocorrelation {
  std::vector<double> values;  // lags 0..max_lag
  double band = 0.0;           // 1.96 / sqrt(N)
};

Autocorrelation autocorrelation(std::span<const double> series, int max_lag);

void write_decomposition_csv(std::ostream& out, std::span<const double> series,
                             const Decomposition& d);
void write_acf_csv(std::ostream& out, const Autocorrelation& acf);

}  // namespace dfocast::data
