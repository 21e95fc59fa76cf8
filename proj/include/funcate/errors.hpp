#pragma once

#include <stdexcept>
#include <string>

namespace funcate {

// Bad inputs: wrong sizes, out-of-range values, violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for data-dependent failures (the fit is impossible or did not
// converge on this particular dataset).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Too few subjects for the requested operation.
class InsufficientData : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// FPCA retained zero modes (e.g. all trajectories identical).
class InsufficientComponents : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// Design matrix is rank deficient (and not rescued by a ridge).
class SingularDesign : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// Logistic MLE diverged: some |coefficient| exceeded 30, the fitted
// probabilities are numerically 0/1.
class SeparationDetected : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// Iterative fit hit its iteration cap without meeting the tolerance.
class NotConverged : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// A truncation-level selection produced L = 0 or an out-of-range L.
class InvalidSelection : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// CBPS Newton solver could not drive the balancing equations to zero.
class BalanceNotAttained : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// Every simulation run in a cell failed or was non-finite.
class NoValidRuns : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// More than 20% of bootstrap resamples failed to fit.
class BootstrapUnstable : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

}  // namespace funcate
