#include "dfocast/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dfocast/error.hpp"

namespace dfocast::nn {
namespace {

constexpr const char* kFormat = "dfocast-seq2seq";
constexpr int kVersion = 1;

}  // namespace

std::string model_to_json(const Seq2SeqModel& model) {
  const auto& c = model.config;
  nlohmann::ordered_json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["config"] = {{"window", c.window},         {"horizon", c.horizon},
                   {"hidden", c.hidden},         {"layers", c.layers},
                   {"epochs", c.epochs},         {"batch_size", c.batch_size},
                   {"learning_rate", c.learning_rate}, {"seed", c.seed},
                   {"use_bias", c.use_bias}};
  doc["input_size"] = model.input_size;
  const Eigen::VectorXd flat = flatten(model);
  doc["parameters"] = std::vector<double>(flat.data(), flat.data() + flat.size());
  return doc.dump();
}

Seq2SeqModel model_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != kFormat ||
        doc.at("version").get<int>() != kVersion) {
      throw Error(ErrorKind::Schema, "not a dfocast seq2seq model document");
    }
    const auto& jc = doc.at("config");
    Seq2SeqConfig config;
    config.window = jc.at("window").get<int>();
    config.horizon = jc.at("horizon").get<int>();
    config.hidden = jc.at("hidden").get<int>();
    config.layers = jc.at("layers").get<int>();
    config.epochs = jc.at("epochs").get<int>();
    config.batch_size = jc.at("batch_size").get<int>();
    config.learning_rate = jc.at("learning_rate").get<double>();
    config.seed = jc.at("seed").get<std::uint64_t>();
    config.use_bias = jc.at("use_bias").get<bool>();
    const auto input_size = doc.at("input_size").get<Eigen::Index>();

    Seq2SeqModel model = init_weights(config, input_size, config.seed);
    const auto params = doc.at("parameters").get<std::vector<double>>();
    unflatten(Eigen::Map<const Eigen::VectorXd>(params.data(),
                                                static_cast<Eigen::Index>(params.size())),
              model);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("malformed model document: ") + e.what());
  }
}

void save_model(const Seq2SeqModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << model_to_json(model) << '\n';
}

Seq2SeqModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace dfocast::nn
