#include "funcate/logistic.hpp"

#include <cassert>
#include <cmath>

#include <Eigen/Dense>

#include "funcate/errors.hpp"

namespace funcate {

double sigmoid(double eta) {
  if (eta >= 0.0) {
    const double e = std::exp(-eta);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(eta)) without overflow.
double log1pexp(double eta) {
  if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

double penalty(const Eigen::VectorXd& beta, double ridge) {
  if (ridge == 0.0 || beta.size() <= 1) return 0.0;
  return 0.5 * ridge * beta.tail(beta.size() - 1).squaredNorm();
}

}  // namespace

double logisticLogLikelihood(const Eigen::MatrixXd& design,
                             const Eigen::VectorXi& y,
                             const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = design * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    ll += y(i) * eta(i) - log1pexp(eta(i));
  return ll;
}

LogisticFit fitLogisticMle(const Eigen::MatrixXd& design,
                           const Eigen::VectorXi& y, double ridge) {
  const Eigen::Index n = design.rows();
  const Eigen::Index d = design.cols();
  if (y.size() != n) throw InvalidArgument("design/response size mismatch");
  if (d < 1) throw InvalidArgument("design needs at least one column");
  for (Eigen::Index i = 0; i < n; ++i)
    if (y(i) != 0 && y(i) != 1)
      throw InvalidArgument("response must be binary 0/1");
  if (d > n) throw SingularDesign("more columns than observations");
  if (ridge == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < d) throw SingularDesign("rank-deficient design");
  }

  // Ridge on non-intercept coefficients only.
  Eigen::VectorXd ridgeDiag = Eigen::VectorXd::Constant(d, ridge);
  ridgeDiag(0) = 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  double objective = logisticLogLikelihood(design, y, beta);
  LogisticFit fit;
  fit.objectiveHistory.push_back(objective);

  for (int iter = 1; iter <= 100; ++iter) {
    fit.iterations = iter;
    const Eigen::VectorXd eta = design * beta;
    Eigen::VectorXd mu(n), wvec(n), z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double m = sigmoid(eta(i));
      m = std::min(std::max(m, 1e-12), 1.0 - 1e-12);
      mu(i) = m;
      wvec(i) = m * (1.0 - m);
      z(i) = eta(i) + (y(i) - m) / wvec(i);
    }

    Eigen::MatrixXd normal = design.transpose() * wvec.asDiagonal() * design;
    normal.diagonal() += ridgeDiag;
    const Eigen::VectorXd rhs =
        design.transpose() * (wvec.asDiagonal() * z);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success)
      throw SingularDesign("IRLS normal equations not solvable");
    const Eigen::VectorXd proposal = ldlt.solve(rhs);
    if (!proposal.allFinite())
      throw SingularDesign("IRLS produced non-finite step");

    // Step halving keeps the penalized objective nondecreasing.
    double step = 1.0;
    Eigen::VectorXd betaNew;
    double objectiveNew = objective;
    bool improved = false;
    for (int h = 0; h < 40; ++h) {
      betaNew = beta + step * (proposal - beta);
      objectiveNew = logisticLogLikelihood(design, y, betaNew) -
                     penalty(betaNew, ridge);
      if (objectiveNew >= objective) {
        improved = true;
        break;
      }
      step /= 2.0;
    }
    if (!improved) break;  // stalled; convergence decided below

    assert(objectiveNew >= objective);
    const double delta = objectiveNew - objective;
    beta = betaNew;
    objective = objectiveNew;
    fit.objectiveHistory.push_back(objective);

    if (beta.cwiseAbs().maxCoeff() > 30.0)
      throw SeparationDetected("logistic coefficients diverged (|coef| > 30)");

    Eigen::VectorXd fittedNow = (design * beta).unaryExpr([](double e) {
      return sigmoid(e);
    });
    Eigen::VectorXd grad =
        design.transpose() * (y.cast<double>() - fittedNow);
    if (ridge != 0.0) grad -= ridgeDiag.asDiagonal() * beta;
    const double gradNorm = grad.cwiseAbs().maxCoeff();
    if (gradNorm < 1e-8 || (delta < 1e-10 && gradNorm <= 1e-6)) {
      fit.converged = true;
      break;
    }
  }

  fit.coefficients = beta;
  fit.logLikelihood = logisticLogLikelihood(design, y, beta);
  fit.fitted = (design * beta).unaryExpr([](double e) { return sigmoid(e); });
  return fit;
}

}  // namespace funcate
