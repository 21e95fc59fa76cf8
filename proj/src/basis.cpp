#include "funcate/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "funcate/errors.hpp"

namespace funcate {

double fourierBasis(int index, double t) {
  if (index < 1) throw InvalidArgument("fourierBasis index must be >= 1");
  const int k = (index + 1) / 2;
  const double arg = 2.0 * std::numbers::pi * k * t;
  const double root2 = std::numbers::sqrt2;
  return (index % 2 == 1) ? root2 * std::cos(arg) : root2 * std::sin(arg);
}

BsplineBasis makeBsplineBasis(int degree, int interiorKnots, double lower,
                              double upper) {
  if (degree < 1) throw InvalidArgument("B-spline degree must be >= 1");
  if (interiorKnots < 0)
    throw InvalidArgument("interior knot count must be >= 0");
  if (!(upper > lower))
    throw InvalidArgument("B-spline domain is degenerate");
  const int total = 2 * (degree + 1) + interiorKnots;
  Eigen::VectorXd knots(total);
  int pos = 0;
  for (int j = 0; j <= degree; ++j) knots(pos++) = lower;
  for (int j = 1; j <= interiorKnots; ++j)
    knots(pos++) = lower + (upper - lower) * j / (interiorKnots + 1);
  for (int j = 0; j <= degree; ++j) knots(pos++) = upper;
  return BsplineBasis{degree, lower, upper, std::move(knots)};
}

Eigen::VectorXd bsplineEval(const BsplineBasis& basis, double x) {
  const int degree = basis.degree;
  const int nb = basis.count();
  const Eigen::VectorXd& t = basis.knots;
  x = std::clamp(x, basis.lower, basis.upper);

  // Knot span index: t[span] <= x < t[span+1], with the right endpoint
  // assigned to the last nonempty span.
  int span = degree;
  const int lastSpan = static_cast<int>(t.size()) - degree - 2;
  while (span < lastSpan && x >= t(span + 1)) ++span;

  // Cox-de Boor triangle for the degree+1 nonzero functions on the span
  // (the standard basis-functions algorithm from the NURBS literature).
  std::vector<double> local(degree + 1, 0.0);
  std::vector<double> left(degree + 1, 0.0);
  std::vector<double> right(degree + 1, 0.0);
  local[0] = 1.0;
  for (int d = 1; d <= degree; ++d) {
    left[d] = x - t(span + 1 - d);
    right[d] = t(span + d) - x;
    double saved = 0.0;
    for (int r = 0; r < d; ++r) {
      const double temp = local[r] / (right[r + 1] + left[d - r]);
      local[r] = saved + right[r + 1] * temp;
      saved = left[d - r] * temp;
    }
    local[d] = saved;
  }

  Eigen::VectorXd values = Eigen::VectorXd::Zero(nb);
  for (int r = 0; r <= degree; ++r) values(span - degree + r) = local[r];
  return values;
}

Eigen::VectorXd tensorRow(const Eigen::VectorXd& bt,
                          const Eigen::VectorXd& bx) {
  if (bt.size() != bx.size())
    throw InvalidArgument("tensorRow inputs must have equal length");
  const Eigen::Index p = bt.size();
  Eigen::VectorXd out(p * p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index l = 0; l < p; ++l) out(j * p + l) = bt(j) * bx(l);
  return out;
}

}  // namespace funcate
