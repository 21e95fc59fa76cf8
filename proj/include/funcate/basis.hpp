#pragma once

#include <Eigen/Core>

namespace funcate {

// Orthonormal Fourier system on [0, 1], 1-based index:
// index 2k-1 -> sqrt(2) cos(2 pi k t), index 2k -> sqrt(2) sin(2 pi k t).
double fourierBasis(int index, double t);

// B-spline basis on [lower, upper] with an open-uniform knot vector
// (boundary knots repeated degree+1 times, interior knots equally spaced).
struct BsplineBasis {
  int degree = 3;
  double lower = 0.0;
  double upper = 1.0;
  Eigen::VectorXd knots;

  // Number of basis functions: interior knots + degree + 1.
  int count() const {
    return static_cast<int>(knots.size()) - degree - 1;
  }
};

BsplineBasis makeBsplineBasis(int degree, int interiorKnots, double lower,
                              double upper);

// Values of all basis functions at x (clamped to [lower, upper]) via the
// Cox-de Boor recursion. Entries are nonnegative and sum to 1.
Eigen::VectorXd bsplineEval(const BsplineBasis& basis, double x);

// Row-major flattened outer product: entry (j, l) = bt[j] * bx[l].
Eigen::VectorXd tensorRow(const Eigen::VectorXd& bt,
                          const Eigen::VectorXd& bx);

}  // namespace funcate
