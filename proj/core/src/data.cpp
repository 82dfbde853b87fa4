#include "dfocast/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dfocast/error.hpp"
#include "dfocast/text.hpp"

namespace dfocast::data {

TimeSeriesDataset::TimeSeriesDataset(std::vector<std::string> names,
                                     std::vector<std::vector<double>> columns,
                                     double cadence, std::size_t offset)
    : names_(std::move(names)), columns_(std::move(columns)), cadence_(cadence),
      offset_(offset) {
  if (names_.size() != columns_.size()) {
    throw Error(ErrorKind::InvalidInput, "column names and columns differ in count");
  }
  for (const auto& col : columns_) {
    if (col.size() != columns_.front().size()) {
      throw Error(ErrorKind::InvalidInput, "dataset columns differ in length");
    }
  }
}

bool TimeSeriesDataset::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t TimeSeriesDataset::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    throw Error(ErrorKind::Schema, "no column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> TimeSeriesDataset::column(const std::string& name) const {
  return columns_[index_of(name)];
}

TimeSeriesDataset TimeSeriesDataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows()) {
    throw Error(ErrorKind::InvalidInput, "slice out of range");
  }
  std::vector<std::vector<double>> cols;
  cols.reserve(columns_.size());
  for (const auto& col : columns_) {
    cols.emplace_back(col.begin() + static_cast<std::ptrdiff_t>(begin),
                      col.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return TimeSeriesDataset(names_, std::move(cols), cadence_, offset_ + begin);
}

TimeSeriesDataset TimeSeriesDataset::select(const std::vector<std::string>& names) const {
  std::vector<std::vector<double>> cols;
  for (const auto& name : names) cols.push_back(columns_[index_of(name)]);
  return TimeSeriesDataset(names, std::move(cols), cadence_, offset_);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    cells.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return cells;
}

}  // namespace

TimeSeriesDataset read_csv(std::istream& in, const std::string& target_column,
                           const std::vector<std::string>& feature_columns) {
  std::vector<std::string> wanted = feature_columns;
  if (std::find(wanted.begin(), wanted.end(), target_column) == wanted.end()) {
    wanted.push_back(target_column);
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::Schema, "CSV input is empty (expected a header row)");
  }
  const std::vector<std::string> header = split_line(line);
  std::vector<std::size_t> source;
  for (const auto& name : wanted) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorKind::Schema, "CSV header has no column '" + name + "'");
    }
    source.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  std::vector<std::vector<double>> columns(wanted.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    for (std::size_t j = 0; j < wanted.size(); ++j) {
      const std::size_t col = source[j];
      const std::string cell = col < cells.size() ? cells[col] : std::string{};
      double value = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || res.ec != std::errc{} ||
          res.ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        throw Error(ErrorKind::Data, "row " + std::to_string(row) + ", column '" +
                                         wanted[j] + "': cannot use value '" + cell +
                                         "'");
      }
      columns[j].push_back(value);
    }
  }
  return TimeSeriesDataset(std::move(wanted), std::move(columns));
}

TimeSeriesDataset load_csv(const std::filesystem::path& path,
                           const std::string& target_column,
                           const std::vector<std::string>& feature_columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open input file " + path.string());
  return read_csv(in, target_column, feature_columns);
}

void write_csv(std::ostream& out, const TimeSeriesDataset& ds) {
  for (std::size_t j = 0; j < ds.column_count(); ++j) {
    out << (j ? "," : "") << ds.names()[j];
  }
  out << '\n';
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < ds.column_count(); ++j) {
      out << (j ? "," : "") << format_double(ds.column(j)[i]);
    }
    out << '\n';
  }
}

Split split_dataset(const TimeSeriesDataset& ds, const SplitSpec& spec) {
  const double total = spec.train_fraction + spec.validation_fraction + spec.test_fraction;
  if (std::abs(total - 1.0) > 1e-9 || spec.train_fraction <= 0.0 ||
      spec.validation_fraction <= 0.0 || spec.test_fraction <= 0.0) {
    throw Error(ErrorKind::InvalidParameter, "split fractions must be positive and sum to 1");
  }
  const std::size_t n = ds.rows();
  if (n < 5) {
    throw Error(ErrorKind::InvalidInput, "series too short to split (need >= 5 rows)");
  }
  const auto n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::floor(spec.validation_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw Error(ErrorKind::InvalidInput, "split leaves an empty segment");
  }
  return {ds.slice(0, n_train), ds.slice(n_train, n_train + n_val),
          ds.slice(n_train + n_val, n)};
}

std::vector<WindowedSample> make_windows(const TimeSeriesDataset& segment, int window,
                                         int horizon, const std::string& target_column,
                                         const std::vector<std::string>& feature_columns) {
  if (window < 1 || horizon < 1) {
    throw Error(ErrorKind::InvalidParameter, "window and horizon must be >= 1");
  }
  if (feature_columns.empty()) {
    throw Error(ErrorKind::InvalidInput, "no feature columns selected");
  }
  const std::size_t n = segment.rows();
  const auto T = static_cast<std::size_t>(window);
  const auto H = static_cast<std::size_t>(horizon);
  if (n < T + H) {
    throw Error(ErrorKind::InvalidInput,
                "segment of " + std::to_string(n) + " rows is shorter than window + horizon (" +
                    std::to_string(T + H) + ")");
  }
  std::vector<std::span<const double>> features;
  for (const auto& name : feature_columns) features.push_back(segment.column(name));
  const std::span<const double> target = segment.column(target_column);

  std::vector<WindowedSample> samples(n - T - H + 1);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    WindowedSample& s = samples[i];
    s.input.resize(window, static_cast<Eigen::Index>(features.size()));
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t q = 0; q < features.size(); ++q) {
        s.input(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(q)) = features[q][i + t];
      }
    }
    s.target_index = i + T - 1 + H;
    s.target = target[s.target_index];
  }
  return samples;
}

AlignedForecast persistence_forecast(std::span<const double> series, int horizon) {
  if (horizon < 1) throw Error(ErrorKind::InvalidParameter, "horizon must be >= 1");
  const auto h = static_cast<std::size_t>(horizon);
  if (series.size() <= h) {
    throw Error(ErrorKind::InvalidInput, "series too short for persistence at this horizon");
  }
  AlignedForecast out;
  out.actual.assign(series.begin() + static_cast<std::ptrdiff_t>(h), series.end());
  out.predicted.assign(series.begin(), series.end() - static_cast<std::ptrdiff_t>(h));
  return out;
}

Decomposition seasonal_decompose(std::span<const double> series, int period) {
  if (period < 1) throw Error(ErrorKind::InvalidParameter, "period must be >= 1");
  const std::size_t n = series.size();
  const auto p = static_cast<std::size_t>(period);
  if (n < 2 * p) {
    throw Error(ErrorKind::InvalidInput, "decomposition needs at least two full periods");
  }

  // Centered filter: p equal weights for odd p; p+1 weights with halved ends
  // for even p.
  std::vector<double> weights;
  if (p % 2 == 1) {
    weights.assign(p, 1.0 / static_cast<double>(p));
  } else {
    weights.assign(p + 1, 1.0 / static_cast<double>(p));
    weights.front() *= 0.5;
    weights.back() *= 0.5;
  }
  const std::size_t half = weights.size() / 2;

  Decomposition d;
  d.trend.assign(n, std::nullopt);
  for (std::size_t t = half; t + half < n; ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) sum += weights[k] * series[t - half + k];
    d.trend[t] = sum;
  }

  std::vector<double> phase_sum(p, 0.0);
  std::vector<std::size_t> phase_count(p, 0);
  for (std::size_t t = 0; t < n; ++t) {
    if (!d.trend[t]) continue;
    phase_sum[t % p] += series[t] - *d.trend[t];
    ++phase_count[t % p];
  }
  std::vector<double> phase_mean(p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    phase_mean[k] = phase_count[k] ? phase_sum[k] / static_cast<double>(phase_count[k]) : 0.0;
  }
  const double centre =
      std::accumulate(phase_mean.begin(), phase_mean.end(), 0.0) / static_cast<double>(p);
  for (double& m : phase_mean) m -= centre;

  d.seasonal.resize(n);
  d.residual.assign(n, std::nullopt);
  for (std::size_t t = 0; t < n; ++t) {
    d.seasonal[t] = phase_mean[t % p];
    if (d.trend[t]) d.residual[t] = series[t] - *d.trend[t] - d.seasonal[t];
  }
  return d;
}

Autocorrelation autocorrelation(std::span<const double> series, int max_lag) {
  const std::size_t n = series.size();
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n) {
    throw Error(ErrorKind::InvalidInput, "max_lag must be in [0, length)");
  }
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  double denom = 0.0;
  for (double x : series) denom += (x - mean) * (x - mean);
  if (!(denom > 0.0)) {
    throw Error(ErrorKind::DegenerateSeries, "autocorrelation undefined for a constant series");
  }
  Autocorrelation acf;
  acf.values.reserve(static_cast<std::size_t>(max_lag) + 1);
  for (std::size_t k = 0; k <= static_cast<std::size_t>(max_lag); ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) num += (series[t] - mean) * (series[t + k] - mean);
    acf.values.push_back(num / denom);
  }
  acf.values[0] = 1.0;
  acf.band = 1.96 / std::sqrt(static_cast<double>(n));
  return acf;
}

void write_decomposition_csv(std::ostream& out, std::span<const double> series,
                             const Decomposition& d) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
  out << "index,observed,trend,seasonal,residual\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    out << t << ',' << format_double(series[t]) << ',' << opt(d.trend[t]) << ','
        << format_double(d.seasonal[t]) << ',' << opt(d.residual[t]) << '\n';
  }
}

void write_acf_csv(std::ostream& out, const Autocorrelation& acf) {
  out << "lag,acf,lower,upper\n";
  for (std::size_t k = 0; k < acf.values.size(); ++k) {
    out << k << ',' << format_double(acf.values[k]) << ',' << format_double(-acf.band) << ','
        << format_double(acf.band) << '\n';
  }
}

}  // namespace dfocast::data
