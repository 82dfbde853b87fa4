#pragma once

#include <filesystem>
#include <string>

#include "dfocast/nn.hpp"

namespace dfocast::nn {

// JSON document holding the config, seed, input size and every parameter in
// flatten() order. Doubles are written in shortest round-trip form, so
// load(save(m)) is bit-identical to m.
std::string model_to_json(const Seq2SeqModel& model);
Seq2SeqModel model_from_json(const std::string& text);

void save_model(const Seq2SeqModel& model, const std::filesystem::path& path);
Seq2SeqModel load_model(const std::filesystem::path& path);

}  // namespace dfocast::nn
