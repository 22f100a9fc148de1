#pragma once

#include <stdexcept>
#include <string>

namespace mmarket {

// Inputs whose sizes do not agree (permutation vs. params, matching vs. instance).
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matching handed to an operation that requires stability has a blocking pair.
class InstabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed or out-of-range configuration (market, experiment, thresholds).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested size exceeds a configured resource cap.
class ResourceLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace mmarket
