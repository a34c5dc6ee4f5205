#pragma once

#include <stdexcept>
#include <string>

namespace mvcorr {

/// Shape or alignment violation between matrices/vectors.
struct DimensionError : std::invalid_argument {
  explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Numerical contract violation (non-finite values, not PSD, singular system).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File-format problems: bad magic, truncated payload, mismatched descriptors.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mvcorr
