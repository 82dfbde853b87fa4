#include "config_reader.hpp"

#include <limits>

#include "dfocast/error.hpp"

namespace dfocast::cli {

Section::Section(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
  if (node_.is_null()) node_ = Json::object();
  if (!node_.is_object()) {
    throw Error(ErrorKind::Schema, (path_.empty() ? std::string("config") : path_) +
                                       " must be a JSON object");
  }
}

const Json* Section::lookup(const std::string& key) {
  used_.insert(key);
  auto it = node_.find(key);
  return it == node_.end() ? nullptr : &*it;
}

bool Section::has(const std::string& key) const { return node_.contains(key); }

void Section::type_error(const std::string& key, const char* expected) const {
  throw Error(ErrorKind::Schema, "config key '" + path_ + key + "' must be " + expected);
}

int Section::get_int(const std::string& key, int fallback) {
  int value = fallback;
  if (const Json* j = lookup(key)) {
    if (!j->is_number_integer()) type_error(key, "an integer");
    const auto v = j->get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      type_error(key, "a 32-bit integer");
    }
    value = static_cast<int>(v);
  }
  resolved_[key] = value;
  return value;
}

std::uint64_t Section::get_uint64(const std::string& key, std::uint64_t fallback) {
  std::uint64_t value = fallback;
  if (const Json* j = lookup(key)) {
    if (!j->is_number_unsigned()) type_error(key, "a non-negative integer");
    value = j->get<std::uint64_t>();
  }
  resolved_[key] = value;
  return value;
}

double Section::get_double(const std::string& key, double fallback) {
  double value = fallback;
  if (const Json* j = lookup(key)) {
    if (!j->is_number()) type_error(key, "a number");
    value = j->get<double>();
  }
  resolved_[key] = value;
  return value;
}

bool Section::get_bool(const std::string& key, bool fallback) {
  bool value = fallback;
  if (const Json* j = lookup(key)) {
    if (!j->is_boolean()) type_error(key, "true or false");
    value = j->get<bool>();
  }
  resolved_[key] = value;
  return value;
}

std::string Section::get_string(const std::string& key, const std::string& fallback) {
  std::string value = fallback;
  if (const Json* j = lookup(key)) {
    if (!j->is_string()) type_error(key, "a string");
    value = j->get<std::string>();
  }
  resolved_[key] = value;
  return value;
}

std::string Section::require_string(const std::string& key) {
  if (!has(key)) throw Error(ErrorKind::Schema, "config key '" + path_ + key + "' is required");
  return get_string(key, {});
}

std::vector<int> Section::get_int_list(const std::string& key, const std::vector<int>& fallback) {
  std::vector<int> value = fallback;
  if (const Json* j = lookup(key)) {
    if (!j->is_array()) type_error(key, "an array of integers");
    value.clear();
    for (const auto& e : *j) {
      if (!e.is_number_integer()) type_error(key, "an array of integers");
      value.push_back(e.get<int>());
    }
  }
  resolved_[key] = value;
  return value;
}

std::vector<double> Section::get_double_list(const std::string& key,
                                             const std::vector<double>& fallback) {
  std::vector<double> value = fallback;
  if (const Json* j = lookup(key)) {
    if (!j->is_array()) type_error(key, "an array of numbers");
    value.clear();
    for (const auto& e : *j) {
      if (!e.is_number()) type_error(key, "an array of numbers");
      value.push_back(e.get<double>());
    }
  }
  resolved_[key] = value;
  return value;
}

std::vector<std::string> Section::get_string_list(const std::string& key,
                                                  const std::vector<std::string>& fallback) {
  std::vector<std::string> value = fallback;
  if (const Json* j = lookup(key)) {
    if (!j->is_array()) type_error(key, "an array of strings");
    value.clear();
    for (const auto& e : *j) {
      if (!e.is_string()) type_error(key, "an array of strings");
      value.push_back(e.get<std::string>());
    }
  }
  resolved_[key] = value;
  return value;
}

Section Section::child(const std::string& key) {
  const Json* j = lookup(key);
  return Section(j ? *j : Json::object(), path_ + key + ".");
}

void Section::adopt(const std::string& key, Section& child) {
  child.finish();
  resolved_[key] = child.resolved();
}

void Section::finish() {
  if (finished_) return;
  finished_ = true;
  for (const auto& item : node_.items()) {
    if (!used_.contains(item.key())) {
      throw Error(ErrorKind::Schema, "unknown config key '" + path_ + item.key() + "'");
    }
  }
}

}  // namespace dfocast::cli
