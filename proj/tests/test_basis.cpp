#include <cmath>
#include <numbers>

#include <doctest.h>

#include "funcate/basis.hpp"
#include "funcate/errors.hpp"
#include "funcate/grid.hpp"
#include "funcate/rng.hpp"

using namespace funcate;

TEST_CASE("fourierBasis values and normalization") {
  CHECK(fourierBasis(1, 0.0) == doctest::Approx(std::numbers::sqrt2));
  CHECK(fourierBasis(2, 0.25) == doctest::Approx(std::numbers::sqrt2));

  const Grid g = trapezoidGrid(101);
  Eigen::VectorXd phi3(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j)
    phi3(j) = fourierBasis(3, g.points(j));
  CHECK(innerProduct(phi3, phi3, g) == doctest::Approx(1.0).epsilon(1e-4));

  CHECK_THROWS_AS(fourierBasis(0, 0.5), InvalidArgument);
}

TEST_CASE("fourierBasis orthonormality of the first six functions") {
  const Grid g = trapezoidGrid(101);
  Eigen::MatrixXd phi(g.size(), 6);
  for (int k = 1; k <= 6; ++k)
    for (Eigen::Index j = 0; j < g.size(); ++j)
      phi(j, k - 1) = fourierBasis(k, g.points(j));
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      const double ip = innerProduct(phi.col(a), phi.col(b), g);
      CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-3);
    }
  }
}

TEST_CASE("cubic B-spline basis with 3 interior knots") {
  const BsplineBasis basis = makeBsplineBasis(3, 3, -1.5, 2.5);
  CHECK(basis.count() == 7);

  const Eigen::VectorXd atLeft = bsplineEval(basis, -1.5);
  CHECK(atLeft(0) == doctest::Approx(1.0).epsilon(0));
  CHECK(atLeft.tail(6).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd atRight = bsplineEval(basis, 2.5);
  CHECK(atRight(6) == doctest::Approx(1.0).epsilon(0));
  CHECK(atRight.head(6).cwiseAbs().maxCoeff() == 0.0);

  RngStream rng(7, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const double x = -1.5 + 4.0 * rng.nextUniform();
    const Eigen::VectorXd v = bsplineEval(basis, x);
    CHECK(v.minCoeff() >= 0.0);
    CHECK(std::abs(v.sum() - 1.0) <= 1e-12);
  }

  // Uniform knots make the basis symmetric about the domain midpoint.
  const Eigen::VectorXd mid = bsplineEval(basis, 0.5);
  CHECK((mid - mid.reverse()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(makeBsplineBasis(3, 3, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("tensorRow flattening") {
  Eigen::VectorXd bt(2), bx(2);
  bt << 1, 0;
  bx << 0, 1;
  const Eigen::VectorXd r1 = tensorRow(bt, bx);
  CHECK(r1(0) == 0.0);
  CHECK(r1(1) == 1.0);
  CHECK(r1(2) == 0.0);
  CHECK(r1(3) == 0.0);

  bt << 0.5, 0.5;
  bx << 0.5, 0.5;
  const Eigen::VectorXd r2 = tensorRow(bt, bx);
  for (int i = 0; i < 4; ++i) CHECK(r2(i) == doctest::Approx(0.25));

  RngStream rng(9, 0);
  Eigen::VectorXd a(5), b(5);
  for (int i = 0; i < 5; ++i) {
    a(i) = rng.nextNormal();
    b(i) = rng.nextNormal();
  }
  CHECK(tensorRow(a, b).sum() ==
        doctest::Approx(a.sum() * b.sum()).epsilon(1e-12));

  Eigen::VectorXd c(3);
  c.setZero();
  CHECK_THROWS_AS(tensorRow(a, c), InvalidArgument);
}
