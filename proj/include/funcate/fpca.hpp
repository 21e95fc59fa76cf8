#pragma once

#include <vector>

#include <Eigen/Core>

#include "funcate/grid.hpp"

namespace funcate {

// Spectral decomposition of the sample covariance operator on the grid.
// Eigenfunctions are orthonormal under the grid inner product; scores are
// the projections of the centered trajectories onto them.
struct FpcaModel {
  Grid grid;
  Eigen::VectorXd mean;            // length m
  Eigen::VectorXd eigenvalues;     // length K, nonincreasing, all > 0
  Eigen::MatrixXd eigenfunctions;  // m x K
  Eigen::MatrixXd scores;          // n x K
  Eigen::VectorXd fveCumulative;   // length K, ends at 1

  int componentCount() const {
    return static_cast<int>(eigenvalues.size());
  }
};

// Discretizes the sample covariance (divisor n), solves the symmetrized
// weighted eigenproblem of W^{1/2} C W^{1/2}, and maps eigenvectors back by
// W^{-1/2}. Modes with eigenvalue <= 1e-12 * lambda_1 are dropped; each
// eigenfunction is flipped so its largest-magnitude entry is positive.
// Throws InsufficientComponents when no positive mode survives.
FpcaModel fitFpca(const GridFunctionSample& sample, int maxComponents);

// Smallest L whose cumulative eigenvalue fraction (over the retained
// modes) reaches the threshold. threshold in (0, 1).
int selectByFve(const FpcaModel& model, double threshold);

// Fits T on [1 | W | scores_1..j] for j = 0..K and applies aicTurningPoint.
// Propagates logistic fit failures.
int selectByAic(const Eigen::MatrixXd& scores, const Eigen::MatrixXd& W,
                const Eigen::VectorXi& treatment);

// aics[j] is the AIC with the top j score columns included, j = 0..K.
// Returns the smallest j >= 1 with aics[j+1] >= aics[j], or K when the
// sequence keeps strictly decreasing; never less than 1.
int aicTurningPoint(const std::vector<double>& aics);

}  // namespace funcate
