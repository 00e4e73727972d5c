#pragma once

#include <stdexcept>

namespace mimolink {

// Shape mismatch between operands (messages name both shapes).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Cholesky-class factorization hit a non-positive pivot: input not HPD.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration value or argument combination.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerically degenerate input (all-zero latent, zero-power frame, ...).
struct DegenerateInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// File read/write failure; message carries the path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Monte Carlo estimate cannot be formed from the given trial budget
// (e.g. an empty outage cell in a diversity-slope fit).
struct InsufficientTrialsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mimolink
