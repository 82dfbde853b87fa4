#pragma once

#include <stdexcept>
#include <string>

namespace dfocast {

/// Broad failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  InvalidInput,
  InvalidParameter,
  Schema,
  Data,
  DegenerateRange,
  DegenerateSeries,
  DegenerateStep,
  GeometryFailure,
  EmptyMask,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dfocast
