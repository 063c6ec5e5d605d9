#pragma once

#include <stdexcept>
#include <string>

namespace cno {

// Invalid argument or configuration value.
struct ParamError : std::invalid_argument {
  explicit ParamError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Unknown condition label or similar missing-key failure.
struct LookupError : std::runtime_error {
  explicit LookupError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite intermediate, singular division, or other numeric breakdown.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cno
