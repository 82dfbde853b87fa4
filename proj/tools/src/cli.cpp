#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "config_reader.hpp"
#include "dfocast/data.hpp"
#include "dfocast/ensemble.hpp"
#include "dfocast/error.hpp"
#include "dfocast/model_io.hpp"
#include "dfocast/online.hpp"
#include "dfocast/synthetic.hpp"
#include "dfocast/text.hpp"
#include "dfocast/tuning.hpp"

namespace fs = std::filesystem;

namespace dfocast::cli {
namespace {

constexpr const char* kVersion = "0.1.0";

struct Invocation {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  fs::path out = "dfocast_out";
  unsigned threads = 1;
};

struct Context {
  Invocation inv;
  Section config;
  fs::path base;  // relative data paths resolve against the config's directory
  std::ostream& log;
};

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Schema, "config file " + path + " is not valid JSON: " + e.what());
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

Json to_json(const metrics::ErrorReport& r) {
  return Json{{"maape", r.maape}, {"nrmse", r.nrmse}, {"mae", r.mae}, {"rmse", r.rmse},
              {"huber", r.huber}};
}

std::uint64_t resolve_seed(Context& ctx) {
  const std::uint64_t from_file = ctx.config.get_uint64("seed", 0);
  if (!ctx.inv.seed) return from_file;
  ctx.config.set("seed", *ctx.inv.seed);
  return *ctx.inv.seed;
}

struct DataSpec {
  fs::path path;
  std::string target;
  std::vector<std::string> features;
};

DataSpec read_data_spec(Context& ctx) {
  Section s = ctx.config.child("data");
  DataSpec d;
  const std::string path = s.require_string("path");
  d.path = fs::path(path).is_absolute() ? fs::path(path) : ctx.base / path;
  d.target = s.require_string("target");
  d.features = s.get_string_list("features", {d.target});
  if (d.features.empty()) throw Error(ErrorKind::Schema, "config key 'data.features' is empty");
  ctx.config.adopt("data", s);
  return d;
}

data::SplitSpec read_split(Context& ctx) {
  Section s = ctx.config.child("split");
  data::SplitSpec spec;
  spec.train_fraction = s.get_double("train", spec.train_fraction);
  spec.validation_fraction = s.get_double("validation", spec.validation_fraction);
  spec.test_fraction = s.get_double("test", spec.test_fraction);
  ctx.config.adopt("split", s);
  return spec;
}

nn::Seq2SeqConfig read_model(Context& ctx, std::uint64_t seed) {
  Section s = ctx.config.child("model");
  nn::Seq2SeqConfig m;
  m.window = s.get_int("window", m.window);
  m.hidden = s.get_int("hidden", m.hidden);
  m.layers = s.get_int("layers", m.layers);
  m.epochs = s.get_int("epochs", m.epochs);
  m.batch_size = s.get_int("batch_size", m.batch_size);
  m.learning_rate = s.get_double("learning_rate", m.learning_rate);
  m.use_bias = s.get_bool("use_bias", m.use_bias);
  ctx.config.adopt("model", s);
  m.seed = seed;
  return m;
}

std::vector<int> read_horizons(Context& ctx) {
  auto h = ctx.config.get_int_list("horizons", {1});
  if (h.empty()) throw Error(ErrorKind::Schema, "config key 'horizons' is empty");
  for (int v : h) {
    if (v < 1) throw Error(ErrorKind::InvalidParameter, "horizons must be >= 1");
  }
  return h;
}

data::TimeSeriesDataset load(Context& ctx, const DataSpec& d) {
  ctx.config.finish();
  return data::load_csv(d.path, d.target, d.features);
}

void write_report(Context& ctx, Json results) {
  ctx.config.finish();
  Json report;
  report["tool"] = "dfocast";
  report["version"] = kVersion;
  report["command"] = ctx.inv.command;
  report["config"] = ctx.config.resolved();
  report["results"] = std::move(results);
  auto out = open_output(ctx.inv.out / "report.json");
  out << report.dump(2) << '\n';
  ctx.log << "wrote " << (ctx.inv.out / "report.json").string() << '\n';
}

// Persistence forecasts for exactly the targets of `samples` within `segment`.
metrics::ErrorReport persistence_on(const data::TimeSeriesDataset& segment,
                                    const std::string& target,
                                    std::span<const WindowedSample> samples, int horizon,
                                    double delta) {
  const auto col = segment.column(target);
  std::vector<double> actual, predicted;
  for (const auto& s : samples) {
    actual.push_back(col[s.target_index]);
    predicted.push_back(col[s.target_index - static_cast<std::size_t>(horizon)]);
  }
  return metrics::error_report({actual, predicted}, delta);
}

void write_predictions(const fs::path& path, const tuning::SegmentScore& seg,
                       const data::TimeSeriesDataset& segment, bool additive) {
  auto out = open_output(path);
  ensemble::write_predictions_csv(out, seg.samples, seg.prediction, segment.offset(), additive);
}

// ---------------------------------------------------------------- generate

int cmd_generate(Context& ctx) {
  const std::uint64_t seed = resolve_seed(ctx);
  const std::string kind = ctx.config.get_string("kind", "seasonal");
  data::TimeSeriesDataset ds;
  if (kind == "seasonal") {
    synthetic::SeasonalSpec s;
    s.seed = seed;
    s.length = static_cast<std::size_t>(ctx.config.get_int("length", static_cast<int>(s.length)));
    s.period = ctx.config.get_int("period", s.period);
    s.amplitude = ctx.config.get_double("amplitude", s.amplitude);
    s.snr = ctx.config.get_double("snr", s.snr);
    s.level = ctx.config.get_double("level", s.level);
    s.slope = ctx.config.get_double("slope", s.slope);
    ds = synthetic::seasonal_series(s);
  } else if (kind == "features") {
    synthetic::FeatureSpec s;
    s.seed = seed;
    s.length = static_cast<std::size_t>(ctx.config.get_int("length", static_cast<int>(s.length)));
    s.features = static_cast<std::size_t>(ctx.config.get_int("features", static_cast<int>(s.features)));
    std::vector<int> informative(s.informative.begin(), s.informative.end());
    informative = ctx.config.get_int_list("informative", informative);
    s.informative.clear();
    for (int i : informative) {
      if (i < 0) throw Error(ErrorKind::InvalidParameter, "informative indices must be >= 0");
      s.informative.push_back(static_cast<std::size_t>(i));
    }
    s.weights = ctx.config.get_double_list("weights", s.weights);
    s.ar = ctx.config.get_double("ar", s.ar);
    s.feature_mean = ctx.config.get_double("feature_mean", s.feature_mean);
    s.level = ctx.config.get_double("level", s.level);
    s.noise = ctx.config.get_double("noise", s.noise);
    ds = synthetic::feature_dataset(s);
  } else {
    throw Error(ErrorKind::Schema, "config key 'kind' must be \"seasonal\" or \"features\"");
  }
  ctx.config.finish();
  {
    auto out = open_output(ctx.inv.out / "data.csv");
    data::write_csv(out, ds);
  }
  write_report(ctx, Json{{"rows", ds.rows()}, {"columns", ds.names()}, {"file", "data.csv"}});
  return 0;
}

// ----------------------------------------------------------------- analyze

int cmd_analyze(Context& ctx) {
  const DataSpec d = read_data_spec(ctx);
  const int period = ctx.config.get_int("period", 24);
  const int max_lag = ctx.config.get_int("max_lag", 48);
  const auto ds = load(ctx, d);
  const auto series = ds.column(d.target);
  const auto dec = data::seasonal_decompose(series, period);
  const auto acf = data::autocorrelation(series, max_lag);
  {
    auto out = open_output(ctx.inv.out / "decomposition.csv");
    data::write_decomposition_csv(out, series, dec);
  }
  {
    auto out = open_output(ctx.inv.out / "acf.csv");
    data::write_acf_csv(out, acf);
  }
  double seasonal_amplitude = 0.0, max_identity_error = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    seasonal_amplitude = std::max(seasonal_amplitude, std::abs(dec.seasonal[t]));
    if (dec.trend[t]) {
      max_identity_error = std::max(
          max_identity_error, std::abs(*dec.trend[t] + dec.seasonal[t] + *dec.residual[t] - series[t]));
    }
  }
  std::vector<int> significant;
  for (std::size_t k = 1; k < acf.values.size(); ++k) {
    if (std::abs(acf.values[k]) >= acf.band) significant.push_back(static_cast<int>(k));
  }
  Json results{{"rows", ds.rows()},
               {"acf", acf.values},
               {"acf_band", acf.band},
               {"significant_lags", significant},
               {"seasonal_amplitude", seasonal_amplitude},
               {"max_reconstruction_error", max_identity_error},
               {"files", {"decomposition.csv", "acf.csv"}}};
  write_report(ctx, std::move(results));
  return 0;
}

// ---------------------------------------------------------------- baseline

int cmd_baseline(Context& ctx) {
  const DataSpec d = read_data_spec(ctx);
  const auto split_spec = read_split(ctx);
  const auto horizons = read_horizons(ctx);
  const double delta = ctx.config.get_double("huber_delta", metrics::kDefaultHuberDelta);
  const auto ds = load(ctx, d);
  const auto split = data::split_dataset(ds, split_spec);
  const auto test = split.test.column(d.target);
  Json per = Json::array();
  for (int h : horizons) {
    const auto f = data::persistence_forecast(test, h);
    const auto report = metrics::error_report({f.actual, f.predicted}, delta);
    const std::string file = "baseline_h" + std::to_string(h) + ".csv";
    auto out = open_output(ctx.inv.out / file);
    out << "index,actual,predicted\n";
    for (std::size_t i = 0; i < f.actual.size(); ++i) {
      out << split.test.offset() + i + static_cast<std::size_t>(h) << ',' << format_double(f.actual[i])
          << ',' << format_double(f.predicted[i]) << '\n';
    }
    per.push_back(Json{{"horizon", h}, {"test", to_json(report)}, {"file", file}});
  }
  write_report(ctx, Json{{"segments", {{"train", split.train.rows()},
                                       {"validation", split.validation.rows()},
                                       {"test", split.test.rows()}}},
                         {"horizons", per}});
  return 0;
}

// ---------------------------------------------------------------- forecast

int cmd_forecast(Context& ctx) {
  const std::uint64_t seed = resolve_seed(ctx);
  const DataSpec d = read_data_spec(ctx);
  const auto split_spec = read_split(ctx);
  nn::Seq2SeqConfig model = read_model(ctx, seed);
  const auto horizons = read_horizons(ctx);
  const auto mode = resampling::mode_from_string(ctx.config.get_string("mode", "additive"));
  const int ef = ctx.config.get_int("ensemble_factor", 1);
  if (ef < 1) throw Error(ErrorKind::InvalidParameter, "ensemble_factor must be >= 1");
  const double delta = ctx.config.get_double("huber_delta", metrics::kDefaultHuberDelta);
  const bool save_models = ctx.config.get_bool("save_models", false);

  const auto ds = load(ctx, d);
  const auto split = data::split_dataset(ds, split_spec);
  tuning::TuningProblem problem;
  problem.train = split.train;
  problem.validation = split.validation;
  problem.target_column = d.target;
  problem.feature_columns = d.features;
  problem.mode = mode;
  problem.base_seed = seed;
  problem.use_bias = model.use_bias;
  problem.threads = ctx.inv.threads;
  tuning::FeatureMask all;
  all.bits.assign(d.features.size(), true);

  Json per = Json::array();
  for (int h : horizons) {
    model.horizon = h;
    problem.horizon = h;
    tuning::TunedConfig config{model, ef, 0};
    const auto score = tuning::evaluate_configuration(problem, split.test, config, all, delta);
    const std::string tag = "h" + std::to_string(h);
    const bool additive = mode == resampling::Mode::Additive;
    write_predictions(ctx.inv.out / ("predictions_" + tag + "_validation.csv"), score.validation,
                      split.validation, additive);
    write_predictions(ctx.inv.out / ("predictions_" + tag + "_test.csv"), score.test, split.test,
                      additive);
    Json member_loss = Json::array();
    for (const auto& l : score.model.member_train_loss) member_loss.push_back(l.empty() ? 0.0 : l.back());
    Json entry{{"horizon", h},
               {"validation", to_json(score.validation.report)},
               {"test", to_json(score.test.report)},
               {"persistence_test",
                to_json(persistence_on(split.test, d.target, score.test.samples, h, delta))},
               {"final_train_loss", member_loss},
               {"files",
                {"predictions_" + tag + "_validation.csv", "predictions_" + tag + "_test.csv"}}};
    if (save_models) {
      Json files = Json::array();
      for (std::size_t i = 0; i < score.model.members.size(); ++i) {
        const std::string name = "model_" + tag + "_member" + std::to_string(i) + ".json";
        nn::save_model(score.model.members[i], ctx.inv.out / name);
        files.push_back(name);
      }
      entry["models"] = files;
    }
    per.push_back(std::move(entry));
  }
  write_report(ctx, Json{{"segments", {{"train", split.train.rows()},
                                       {"validation", split.validation.rows()},
                                       {"test", split.test.rows()}}},
                         {"horizons", per}});
  return 0;
}

// ------------------------------------------------------ tune / select-features

tuning::HyperparameterSpace read_space(Context& ctx) {
  Section s = ctx.config.child("space");
  tuning::HyperparameterSpace sp;
  sp.epochs = s.get_int_list("epochs", sp.epochs);
  sp.batch_size = s.get_int_list("batch_size", sp.batch_size);
  sp.hidden = s.get_int_list("hidden", sp.hidden);
  sp.window = s.get_int_list("window", sp.window);
  sp.learning_rate_grid = s.get_double_list("learning_rate_grid", sp.learning_rate_grid);
  std::vector<int> lr_default;
  for (std::size_t i = 0; i < sp.learning_rate_grid.size(); ++i) lr_default.push_back(static_cast<int>(i));
  sp.learning_rate_index = s.get_int_list("learning_rate_index", lr_default);
  sp.layers = s.get_int_list("layers", sp.layers);
  sp.ensemble_factor = s.get_int_list("ensemble_factor", sp.ensemble_factor);
  ctx.config.adopt("space", s);
  sp.validate();
  return sp;
}

sdfo::SdfoConfig read_sdfo(Context& ctx) {
  Section s = ctx.config.child("sdfo");
  sdfo::SdfoConfig c;
  c.budget = s.get_int("budget", c.budget);
  c.initial_radius = s.get_double("initial_radius", c.initial_radius);
  c.shrink = s.get_double("shrink", c.shrink);
  c.expand = s.get_double("expand", c.expand);
  c.eta0 = s.get_double("eta0", c.eta0);
  c.eta1 = s.get_double("eta1", c.eta1);
  c.theta = s.get_double("theta", c.theta);
  c.penalty = s.get_double("penalty", c.penalty);
  c.upper_bound = s.get_double("upper_bound", c.upper_bound);
  c.max_radius = s.get_double("max_radius", c.max_radius);
  c.min_radius = s.get_double("min_radius", c.min_radius);
  ctx.config.adopt("sdfo", s);
  return c;
}

Json config_json(const tuning::TunedConfig& c) {
  return Json{{"epochs", c.model.epochs},
              {"batch_size", c.model.batch_size},
              {"hidden", c.model.hidden},
              {"window", c.model.window},
              {"learning_rate_index", c.learning_rate_index},
              {"learning_rate", c.model.learning_rate},
              {"layers", c.model.layers},
              {"ensemble_factor", c.ensemble_factor}};
}

Json trace_json(const tuning::TuningResult& r) {
  Json rows = Json::array();
  for (const auto& e : r.trace.history) {
    Json point = Json::array();
    for (Eigen::Index i = 0; i < e.point.size(); ++i) point.push_back(e.point(i));
    Json row{{"iteration", e.iteration}, {"kind", sdfo::to_string(e.kind)}, {"point", point},
             {"decoded", e.decoded},     {"value", e.value},                 {"rho", e.rho},
             {"radius", e.radius},       {"accepted", e.accepted}};
    if (e.failed || e.penalized) row["note"] = e.failed ? e.note : "out of bounds";
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_tuning(Context& ctx, bool with_features) {
  const std::uint64_t seed = resolve_seed(ctx);
  const DataSpec d = read_data_spec(ctx);
  const auto split_spec = read_split(ctx);
  const int horizon = ctx.config.get_int("horizon", 1);
  if (horizon < 1) throw Error(ErrorKind::InvalidParameter, "horizon must be >= 1");
  const auto mode = resampling::mode_from_string(ctx.config.get_string("mode", "additive"));
  const bool use_bias = ctx.config.get_bool("use_bias", false);
  const double delta = ctx.config.get_double("huber_delta", metrics::kDefaultHuberDelta);
  const auto space = read_space(ctx);
  const auto sdfo_config = read_sdfo(ctx);
  std::vector<std::size_t> forced;
  std::vector<std::string> forced_names;
  if (with_features) {
    forced_names = ctx.config.get_string_list("forced_include", {});
    for (const auto& name : forced_names) {
      const auto it = std::find(d.features.begin(), d.features.end(), name);
      if (it == d.features.end()) {
        throw Error(ErrorKind::Schema, "forced_include names '" + name + "', which is not in data.features");
      }
      forced.push_back(static_cast<std::size_t>(it - d.features.begin()));
    }
  }

  const auto ds = load(ctx, d);
  const auto split = data::split_dataset(ds, split_spec);
  tuning::TuningProblem problem;
  problem.train = split.train;
  problem.validation = split.validation;
  problem.target_column = d.target;
  problem.feature_columns = d.features;
  problem.horizon = horizon;
  problem.mode = mode;
  problem.base_seed = seed;
  problem.use_bias = use_bias;
  problem.upper_bound = sdfo_config.upper_bound;
  problem.threads = ctx.inv.threads;

  const auto result = with_features
                          ? tuning::select_features(problem, space, sdfo_config, forced, seed)
                          : tuning::tune_hyperparameters(problem, space, sdfo_config, seed);
  const auto score = tuning::evaluate_configuration(problem, split.test, result.best, result.mask, delta);

  {
    auto out = open_output(ctx.inv.out / "history.csv");
    sdfo::write_history_csv(out, result.trace, &result.search_space);
  }
  const bool additive = mode == resampling::Mode::Additive;
  write_predictions(ctx.inv.out / "predictions_validation.csv", score.validation, split.validation, additive);
  write_predictions(ctx.inv.out / "predictions_test.csv", score.test, split.test, additive);

  Json dims = Json::array();
  for (const auto& dim : result.search_space.dims) dims.push_back(dim.name);
  Json results{{"best", config_json(result.best)},
               {"objective", result.best_value},
               {"search_dimensions", dims},
               {"evaluations", result.trace.history.size()},
               {"trainings", result.trainings},
               {"best_trace", result.trace.best_trace},
               {"trace", trace_json(result)},
               {"validation", to_json(score.validation.report)},
               {"test", to_json(score.test.report)},
               {"persistence_test",
                to_json(persistence_on(split.test, d.target, score.test.samples, horizon, delta))},
               {"log", result.log},
               {"files", {"history.csv", "predictions_validation.csv", "predictions_test.csv"}}};
  if (with_features) {
    results["mask"] = result.mask.to_string();
    results["features"] = d.features;
    results["selected"] = tuning::selected_features(d.features, result.mask);
    results["forced_include"] = forced_names;
  }
  write_report(ctx, std::move(results));
  return 0;
}

int cmd_tune(Context& ctx) { return run_tuning(ctx, false); }
int cmd_select(Context& ctx) { return run_tuning(ctx, true); }

// ------------------------------------------------------------------ online

int cmd_online(Context& ctx) {
  const std::uint64_t seed = resolve_seed(ctx);
  const DataSpec d = read_data_spec(ctx);
  const nn::Seq2SeqConfig model = read_model(ctx, seed);
  Section s = ctx.config.child("online");
  online::OnlineRunConfig rc;
  rc.warmup_fraction = s.get_double("warmup_fraction", rc.warmup_fraction);
  rc.update_steps = s.get_int("update_steps", rc.update_steps);
  rc.update_window = s.get_int("update_window", rc.update_window);
  ctx.config.adopt("online", s);
  const bool compare = ctx.config.get_bool("compare_frozen", true);

  const auto ds = load(ctx, d);
  online::OnlineResult result;
  {
    auto out = open_output(ctx.inv.out / "online.csv");
    online::StreamingCsvWriter writer(out);
    result = online::run_online(ds, d.target, d.features, model, rc, std::ref(writer));
  }
  Json results{{"steps", result.steps.size()},
               {"first_index", result.steps.empty() ? 0 : result.steps.front().index},
               {"online", to_json(result.report)},
               {"warmup_loss", result.warmup_loss},
               {"files", {"online.csv"}}};
  if (compare) {
    online::OnlineRunConfig frozen = rc;
    frozen.update_steps = 0;
    results["frozen"] = to_json(online::run_online(ds, d.target, d.features, model, frozen).report);
  }
  write_report(ctx, std::move(results));
  return 0;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Schema:
    case ErrorKind::InvalidParameter:
      return 2;
    case ErrorKind::Data:
    case ErrorKind::Io:
    case ErrorKind::InvalidInput:
    case ErrorKind::DegenerateRange:
    case ErrorKind::DegenerateSeries:
      return 3;
    default:
      return 1;
  }
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << Json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using Handler = int (*)(Context&);
  const std::vector<std::pair<std::string, std::pair<Handler, std::string>>> commands{
      {"analyze", {cmd_analyze, "seasonal decomposition and ACF of the target column"}},
      {"forecast", {cmd_forecast, "train and score a fixed ensemble per horizon"}},
      {"tune", {cmd_tune, "tune hyperparameters with SDFO-TR"}},
      {"select-features", {cmd_select, "tune hyperparameters and a feature mask"}},
      {"online", {cmd_online, "one-step-ahead forecasting with incremental updates"}},
      {"baseline", {cmd_baseline, "persistence forecast metrics on the test segment"}},
      {"generate", {cmd_generate, "write a seeded synthetic dataset"}},
  };

  CLI::App app{"dfocast: ensemble LSTM forecasting tuned by trust-region DFO", "dfocast"};
  app.require_subcommand(1);
  Invocation inv;
  std::uint64_t seed = 0;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, CLI::Option*> seed_opts;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", inv.config_path, "JSON run configuration");
    seed_opts[name] = sub->add_option("--seed", seed, "seed (overrides the config)");
    sub->add_option("--out", inv.out, "output directory")->capture_default_str();
    sub->add_option("--threads", inv.threads, "ensemble members trained concurrently")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    subs[name] = sub;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what(), 2);
    return 2;
  }

  Handler handler = nullptr;
  for (const auto& [name, entry] : commands) {
    if (subs[name]->parsed()) {
      inv.command = name;
      handler = entry.first;
      if (seed_opts[name]->count() > 0) inv.seed = seed;
    }
  }

  try {
    const Json config = load_config(inv.config_path);
    fs::path base = inv.config_path.empty() ? fs::path(".") : fs::path(inv.config_path).parent_path();
    Context ctx{inv, Section(config, ""), base, out};
    std::error_code ec;
    fs::create_directories(inv.out, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + inv.out.string());
    return handler(ctx);
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    print_error(err, to_string(e.kind()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    print_error(err, "runtime", e.what(), 1);
    return 1;
  }
}

}  // namespace dfocast::cli
