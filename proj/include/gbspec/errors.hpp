#pragma once

#include <stdexcept>
#include <string>

namespace gbspec {

// Error taxonomy; the CLI maps each class to a distinct exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by the banded factorization when a pivot is too small to trust.
// count_below() catches this and retries with a perturbed shift.
struct FactorizationBreakdown : NumericError {
  using NumericError::NumericError;
};

}  // namespace gbspec
