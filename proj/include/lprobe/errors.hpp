#pragma once

#include <stdexcept>
#include <string>

namespace lprobe {

/// Bad problem setup: mismatched dimensions, invalid spec fields, bad config keys.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// API misuse: violated preconditions that a caller controls directly.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values or other numerical breakdown during evaluation.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lprobe
