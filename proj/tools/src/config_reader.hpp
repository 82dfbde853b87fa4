#pragma once

#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace dfocast::cli {

using Json = nlohmann::ordered_json;

/// Typed, strict view of one JSON object. Every getter records the value it
/// returns (default included) in resolved(); finish() rejects keys nobody
/// asked for. All failures are Schema errors naming the offending key.
class Section {
 public:
  Section(const Json& node, std::string path);

  int get_int(const std::string& key, int fallback);
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::string get_string(const std::string& key, const std::string& fallback);
  std::string require_string(const std::string& key);
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback);
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback);
  std::vector<std::string> get_string_list(const std::string& key,
                                           const std::vector<std::string>& fallback);
  bool has(const std::string& key) const;

  /// Nested object; a missing key reads as an empty object.
  Section child(const std::string& key);
  /// Stores a finished child's resolved document under `key`.
  void adopt(const std::string& key, Section& child);

  /// Overrides a resolved value (command-line flags win over the file).
  void set(const std::string& key, Json value) { resolved_[key] = std::move(value); }

  const Json& resolved() const { return resolved_; }
  void finish();

 private:
  const Json* lookup(const std::string& key);
  [[noreturn]] void type_error(const std::string& key, const char* expected) const;

  Json node_;
  std::string path_;
  std::set<std::string> used_;
  Json resolved_ = Json::object();
  bool finished_ = false;
};

}  // namespace dfocast::cli
