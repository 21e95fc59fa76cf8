#pragma once

#include <vector>

#include <Eigen/Core>

namespace funcate {

struct LogisticFit {
  Eigen::VectorXd coefficients;  // intercept first
  double logLikelihood = 0.0;    // unpenalized, at the final coefficients
  int iterations = 0;
  bool converged = false;
  Eigen::VectorXd fitted;  // sigmoid(design * coefficients), unclipped
  // Penalized log-likelihood after each accepted IRLS step (index 0 is the
  // zero start); nondecreasing by construction.
  std::vector<double> objectiveHistory;
};

double sigmoid(double eta);

double logisticLogLikelihood(const Eigen::MatrixXd& design,
                             const Eigen::VectorXi& y,
                             const Eigen::VectorXd& beta);

// Logistic regression by IRLS from a zero start with step halving.
// ridge > 0 adds a quadratic penalty (ridge/2)*||beta||^2 on all
// non-intercept coefficients and stabilizes the normal equations.
// Converged when the log-likelihood gradient max-norm drops below 1e-8, or
// the objective change falls below 1e-10 with the gradient already small;
// capped at 100 iterations. Throws SingularDesign for a rank-deficient
// design (ridge == 0) and SeparationDetected once any |coefficient| > 30.
LogisticFit fitLogisticMle(const Eigen::MatrixXd& design,
                           const Eigen::VectorXi& y, double ridge = 0.0);

}  // namespace funcate
