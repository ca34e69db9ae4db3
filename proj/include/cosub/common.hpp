#pragma once

#include <stdexcept>
#include <string>

namespace cosub {

inline constexpr const char* kVersion = "1.0.0";

// Bad user input: malformed files, inconsistent counts, schema violations.
// The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public ValidationError {
 public:
  explicit ParseError(const std::string& msg) : ValidationError(msg) {}
};

// Runtime failures inside the sampler or numerics. Exit code 1.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class SamplingError : public NumericError {
 public:
  explicit SamplingError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace cosub
