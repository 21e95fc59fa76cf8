#include "funcate/fpca.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "funcate/errors.hpp"
#include "funcate/logistic.hpp"

namespace funcate {

FpcaModel fitFpca(const GridFunctionSample& sample, int maxComponents) {
  const Eigen::Index n = sample.n();
  const Eigen::Index m = sample.m();
  if (n < 2) throw InsufficientData("fitFpca needs at least 2 trajectories");
  const Eigen::Index cap = std::min<Eigen::Index>(n - 1, m);
  if (maxComponents < 1 || maxComponents > cap)
    throw InvalidArgument("maxComponents must be in [1, min(n-1, m)]");

  CenteredSample centered = centerSample(sample);
  const Eigen::MatrixXd& xc = centered.sample.values;

  Eigen::MatrixXd cov = (xc.transpose() * xc) / static_cast<double>(n);
  if (!cov.allFinite()) throw InvalidArgument("non-finite covariance");

  // Symmetrized weighted eigenproblem: B = W^{1/2} C W^{1/2}.
  const Eigen::VectorXd sqrtW = sample.grid.weights.cwiseSqrt();
  Eigen::MatrixXd b =
      sqrtW.asDiagonal() * cov * sqrtW.asDiagonal();
  b = ((b + b.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success)
    throw EstimationError("covariance eigendecomposition failed");
  const Eigen::VectorXd& valuesAsc = solver.eigenvalues();
  const Eigen::MatrixXd& vectorsAsc = solver.eigenvectors();

  const double largest = valuesAsc(m - 1);
  const double floor = 1e-12 * std::max(largest, 0.0);
  int retained = 0;
  for (Eigen::Index j = m - 1; j >= 0 && retained < maxComponents; --j) {
    if (valuesAsc(j) > 0.0 && valuesAsc(j) > floor)
      ++retained;
    else
      break;  // ascending order: everything below is smaller
  }
  if (retained == 0)
    throw InsufficientComponents("no positive covariance mode retained");

  Eigen::VectorXd eigenvalues(retained);
  Eigen::MatrixXd eigenfunctions(m, retained);
  for (int k = 0; k < retained; ++k) {
    const Eigen::Index src = m - 1 - k;
    eigenvalues(k) = valuesAsc(src);
    Eigen::VectorXd phi = vectorsAsc.col(src).cwiseQuotient(sqrtW);
    const double norm =
        std::sqrt(innerProduct(phi, phi, sample.grid));
    phi /= norm;
    // Deterministic sign: largest-magnitude entry positive.
    Eigen::Index argmax = 0;
    phi.cwiseAbs().maxCoeff(&argmax);
    if (phi(argmax) < 0.0) phi = -phi;
    eigenfunctions.col(k) = phi;
  }

  Eigen::MatrixXd scores =
      xc * sample.grid.weights.asDiagonal() * eigenfunctions;

  const double total = eigenvalues.sum();
  Eigen::VectorXd fve(retained);
  double partial = 0.0;
  for (int k = 0; k < retained; ++k) {
    partial += eigenvalues(k);
    fve(k) = partial / total;
  }

  return FpcaModel{sample.grid,       std::move(centered.mean),
                   std::move(eigenvalues), std::move(eigenfunctions),
                   std::move(scores), std::move(fve)};
}

int selectByFve(const FpcaModel& model, double threshold) {
  if (model.componentCount() < 1)
    throw InvalidArgument("selectByFve needs at least one mode");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw InvalidArgument("FVE threshold must be in (0, 1)");
  const double total = model.eigenvalues.sum();
  double partial = 0.0;
  for (int k = 0; k < model.componentCount(); ++k) {
    partial += model.eigenvalues(k);
    if (partial / total >= threshold) return k + 1;
  }
  return model.componentCount();
}

int aicTurningPoint(const std::vector<double>& aics) {
  if (aics.size() < 2)
    throw InvalidArgument("aicTurningPoint needs AICs for j = 0..K, K >= 1");
  const int K = static_cast<int>(aics.size()) - 1;
  for (int j = 1; j < K; ++j) {
    if (aics[j + 1] >= aics[j]) return j;
  }
  return K;
}

int selectByAic(const Eigen::MatrixXd& scores, const Eigen::MatrixXd& W,
                const Eigen::VectorXi& treatment) {
  const Eigen::Index n = treatment.size();
  const int K = static_cast<int>(scores.cols());
  const int q = static_cast<int>(W.cols());
  if (K < 1) throw InvalidArgument("selectByAic needs at least one score");
  if (scores.rows() != n || (q > 0 && W.rows() != n))
    throw InvalidArgument("selectByAic size mismatch");

  std::vector<double> aics;
  aics.reserve(K + 1);
  for (int j = 0; j <= K; ++j) {
    Eigen::MatrixXd design(n, 1 + q + j);
    design.col(0).setOnes();
    if (q > 0) design.middleCols(1, q) = W;
    if (j > 0) design.rightCols(j) = scores.leftCols(j);
    LogisticFit fit = fitLogisticMle(design, treatment);
    if (!fit.converged)
      throw NotConverged("AIC candidate logistic fit did not converge");
    aics.push_back(-2.0 * fit.logLikelihood + 2.0 * (1 + q + j));
  }
  return aicTurningPoint(aics);
}

}  // namespace funcate
