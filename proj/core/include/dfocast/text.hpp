#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace dfocast {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace dfocast
