#pragma once

#include <stdexcept>
#include <string>

namespace annealbench {

/// Caller misuse: bad arguments, malformed config, contract violations.
/// CLI exit code 1.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: eigensolver non-convergence, norm drift past the
/// configured ceiling. CLI exit code 2.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (degenerate
/// ground state, level crossing, no root). CLI exit code 2.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem failure. CLI exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace annealbench
