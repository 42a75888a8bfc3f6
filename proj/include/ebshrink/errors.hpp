#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ebshrink {

// Caller-supplied values violate an invariant (non-positive variance, empty
// input list, mismatched lengths, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The ratio estimator cannot be formed because the control mean is zero.
class DegenerateDenominator : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// The closed-form hybrid path only supports a = b = 1.
class UnsupportedHyperparameters : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Bad scenario, axis, flag, or statistic configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A requested namespace or file does not exist.
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The hyperparameter store changed underneath a read-modify-write cycle.
// Safe to retry.
class StoreConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Metrics were requested over an empty subset; there is nothing to report.
class AbsentMetrics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-addressed parse failure for CSV and config files.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ebshrink
