#pragma once

#include <Eigen/Core>

namespace funcate {

// Quadrature grid on [0, 1]: strictly increasing points starting at 0 and
// ending at 1, with nonnegative weights that integrate the constant
// function to 1 (within 1e-12).
struct Grid {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return points.size(); }
};

// Validates the Grid invariants; throws InvalidArgument on violation.
Grid makeGrid(Eigen::VectorXd points, Eigen::VectorXd weights);

// Equally spaced grid with composite trapezoid weights
// (h/2, h, ..., h, h/2), h = 1/(numPoints-1). numPoints >= 3.
Grid trapezoidGrid(int numPoints);

// Arbitrary strictly increasing points in [0, 1] (first 0, last 1) with
// trapezoid weights derived from the local spacings.
Grid gridFromPoints(const Eigen::VectorXd& points);

// Weighted inner product sum_j w_j f_j g_j. f and g must match the grid.
double innerProduct(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                    const Grid& grid);

// n functional trajectories on a shared grid, one row per subject.
struct GridFunctionSample {
  Grid grid;
  Eigen::MatrixXd values;  // n x m

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index m() const { return values.cols(); }
};

// Validates finiteness and column count against the grid.
GridFunctionSample makeSample(Grid grid, Eigen::MatrixXd values);

struct CenteredSample {
  GridFunctionSample sample;
  Eigen::VectorXd mean;  // pointwise sample mean, length m
};

// Subtracts the pointwise sample mean; requires n >= 2.
CenteredSample centerSample(const GridFunctionSample& sample);

}  // namespace funcate
