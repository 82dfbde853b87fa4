#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace dfocast {

/// One supervised window: T rows of Q features and the target value T' steps
/// after the last input row.
struct WindowedSample {
  Eigen::MatrixXd input;          // T x Q
  double target = 0.0;
  std::size_t target_index = 0;   // row of the target within its segment
};

}  // namespace dfocast
