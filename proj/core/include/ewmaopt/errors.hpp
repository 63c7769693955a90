#pragma once

#include <stdexcept>
#include <string>

namespace ewmaopt {

/// Base class for numerical failures raised by the library. Argument
/// validation failures use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A series or iteration hit its term/step cap before its stop rule fired.
class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A closed-form recursion lost too many digits (boundary residual too large).
class CancellationDetected : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The discretized operator (I - K) is numerically singular.
class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Threshold bracket could not be expanded to straddle the target.
class BracketFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A simulated run exceeded the configured horizon cap.
class HorizonCap : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Too few runs survived past the change-point to condition on.
class InsufficientConditioning : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A Monte Carlo estimate had too many horizon-cap hits to be trusted.
class FlaggedEstimate : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ewmaopt
