#include "funcate/grid.hpp"

#include <cmath>

#include "funcate/errors.hpp"

namespace funcate {

Grid makeGrid(Eigen::VectorXd points, Eigen::VectorXd weights) {
  const Eigen::Index m = points.size();
  if (m < 3) throw InvalidArgument("grid needs at least 3 points");
  if (weights.size() != m)
    throw InvalidArgument("grid points/weights length mismatch");
  for (Eigen::Index j = 1; j < m; ++j) {
    if (!(points(j) > points(j - 1)))
      throw InvalidArgument("grid points must be strictly increasing");
  }
  if (points(0) != 0.0 || points(m - 1) != 1.0)
    throw InvalidArgument("grid must start at 0 and end at 1");
  if ((weights.array() < 0.0).any())
    throw InvalidArgument("grid weights must be nonnegative");
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    throw InvalidArgument("grid weights must sum to 1");
  return Grid{std::move(points), std::move(weights)};
}

Grid trapezoidGrid(int numPoints) {
  if (numPoints < 3) throw InvalidArgument("trapezoidGrid needs >= 3 points");
  const double h = 1.0 / (numPoints - 1);
  Eigen::VectorXd points(numPoints);
  Eigen::VectorXd weights(numPoints);
  for (int j = 0; j < numPoints; ++j) {
    points(j) = static_cast<double>(j) / (numPoints - 1);
    weights(j) = (j == 0 || j == numPoints - 1) ? h / 2.0 : h;
  }
  return makeGrid(std::move(points), std::move(weights));
}

Grid gridFromPoints(const Eigen::VectorXd& points) {
  const Eigen::Index m = points.size();
  if (m < 3) throw InvalidArgument("grid needs at least 3 points");
  Eigen::VectorXd weights(m);
  weights(0) = (points(1) - points(0)) / 2.0;
  for (Eigen::Index j = 1; j + 1 < m; ++j)
    weights(j) = (points(j + 1) - points(j - 1)) / 2.0;
  weights(m - 1) = (points(m - 1) - points(m - 2)) / 2.0;
  return makeGrid(points, std::move(weights));
}

double innerProduct(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                    const Grid& grid) {
  if (f.size() != grid.size() || g.size() != grid.size())
    throw InvalidArgument("innerProduct: length mismatch with grid");
  return (grid.weights.array() * f.array() * g.array()).sum();
}

GridFunctionSample makeSample(Grid grid, Eigen::MatrixXd values) {
  if (values.cols() != grid.size())
    throw InvalidArgument("sample columns must match grid length");
  if (!values.allFinite())
    throw InvalidArgument("sample values must be finite");
  return GridFunctionSample{std::move(grid), std::move(values)};
}

CenteredSample centerSample(const GridFunctionSample& sample) {
  if (sample.n() < 2)
    throw InsufficientData("centerSample needs at least 2 trajectories");
  Eigen::VectorXd mean = sample.values.colwise().mean();
  Eigen::MatrixXd centered = sample.values.rowwise() - mean.transpose();
  return CenteredSample{GridFunctionSample{sample.grid, std::move(centered)},
                        std::move(mean)};
}

}  // namespace funcate
