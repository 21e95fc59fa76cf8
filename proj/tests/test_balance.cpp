#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include <Eigen/Dense>

#include "funcate/balance.hpp"
#include "funcate/basis.hpp"
#include "funcate/errors.hpp"
#include "funcate/logistic.hpp"
#include "funcate/rng.hpp"

#include "test_util.hpp"

using namespace funcate;

namespace {

// Independent reference: k4 as the scaled Bernoulli polynomial B4(d)/24.
double sobolev1dViaBernoulli(double s, double t) {
  const double d = std::abs(s - t);
  const double b4 = ((d * d * d * d) - 2.0 * d * d * d + d * d - 1.0 / 30.0);
  const double k1s = s - 0.5, k1t = t - 0.5;
  const double k2s = 0.5 * (k1s * k1s - 1.0 / 12.0);
  const double k2t = 0.5 * (k1t * k1t - 1.0 / 12.0);
  return 1.0 + k1s * k1t + k2s * k2t - b4 / 24.0;
}

}  // namespace

TEST_CASE("buildSubstitute column counts") {
  // Exact rank-2 trajectories: L equals the rank.
  const Grid grid = trapezoidGrid(51);
  RngStream rng(21, 0);
  const int n = 60;
  Eigen::MatrixXd loadings(n, 2);
  for (int i = 0; i < n; ++i) {
    loadings(i, 0) = rng.nextNormal();
    loadings(i, 1) = rng.nextNormal();
  }
  Eigen::MatrixXd basisVals(grid.size(), 2);
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    basisVals(j, 0) = fourierBasis(1, grid.points(j));
    basisVals(j, 1) = fourierBasis(2, grid.points(j));
  }
  Eigen::MatrixXd W(n, 0);
  const SubstituteCovariate sub = buildSubstitute(
      W, makeSample(grid, loadings * basisVals.transpose()), 0.999);
  CHECK(sub.C.cols() == 2);
  CHECK(sub.scoreCount == 2);
}

TEST_CASE("buildSubstitute reaches 7 columns under the simulated design") {
  int hits = 0;
  for (int rep = 0; rep < 20; ++rep) {
    testutil::SimData sim = testutil::makeSimData(1, 1, 500, 500 + rep);
    const SubstituteCovariate sub =
        buildSubstitute(sim.data.W, sim.data.X, 0.95);
    if (sub.C.cols() == 7) ++hits;
  }
  CHECK(hits >= 18);
}

TEST_CASE("buildSubstitute propagates degenerate trajectories") {
  const Grid grid = trapezoidGrid(11);
  Eigen::MatrixXd W = Eigen::MatrixXd::Random(8, 2);
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(8, 11);
  CHECK_THROWS_AS(buildSubstitute(W, makeSample(grid, zero), 0.95),
                  InsufficientComponents);
}

TEST_CASE("fitCbps intercept-only closed form") {
  Eigen::MatrixXd C(7, 0);
  Eigen::VectorXi T(7);
  T << 1, 1, 1, 0, 0, 0, 0;
  const PropensityFit fit = fitCbps(makeSubstitute(C, 0), T, BalanceSpec{1});
  CHECK(fit.converged);
  for (int i = 0; i < 7; ++i)
    CHECK((*fit.propensities)(i) ==
          doctest::Approx(3.0 / 7.0).epsilon(1e-10));
}

TEST_CASE("converged fitCbps balances the requested moments") {
  for (int momentOrder = 1; momentOrder <= 2; ++momentOrder) {
    for (int rep = 0; rep < 10; ++rep) {
      testutil::SimData sim =
          testutil::makeSimData(1, 1, 200, 1700 + rep);
      const SubstituteCovariate sub =
          buildSubstitute(sim.data.W, sim.data.X, 0.95);
      PropensityFit fit;
      try {
        fit = fitCbps(sub, sim.data.T, BalanceSpec{momentOrder});
      } catch (const EstimationError&) {
        continue;  // non-converged replication; the claim is conditional
      }
      const Eigen::MatrixXd design =
          balanceDesign(sub.C, BalanceSpec{momentOrder});
      const Eigen::VectorXd residual =
          balanceResidual(design, sim.data.T, *fit.propensities);
      CHECK(residual.cwiseAbs().maxCoeff() < 1e-6);
      CHECK(*fit.balanceResidual < 1e-6);
    }
  }
}

TEST_CASE("fitCbps improves the balance residual over the plain MLE") {
  testutil::SimData sim = testutil::makeSimData(1, 1, 300, 99);
  const SubstituteCovariate sub =
      buildSubstitute(sim.data.W, sim.data.X, 0.95);
  const BalanceSpec spec{1};
  const Eigen::MatrixXd design = balanceDesign(sub.C, spec);
  const LogisticFit mle = fitLogisticMle(design, sim.data.T);
  const double mleResidual =
      balanceResidual(design, sim.data.T, mle.fitted).cwiseAbs().maxCoeff();
  const PropensityFit cbps = fitCbps(sub, sim.data.T, spec);
  CHECK(*cbps.balanceResidual <= mleResidual + 1e-12);
}

TEST_CASE("fitCbps rejects a rank-deficient balance design") {
  Eigen::MatrixXd C(10, 2);
  C.col(0).setOnes();  // collinear with the balance intercept
  C.col(1).setLinSpaced(10, 0.0, 1.0);
  Eigen::VectorXi T(10);
  for (int i = 0; i < 10; ++i) T(i) = i % 2;
  CHECK_THROWS_AS(fitCbps(makeSubstitute(C, 0), T, BalanceSpec{1}),
                  SingularDesign);
}

TEST_CASE("sobolevKernel closed-form value and symmetry") {
  Eigen::VectorXd u(1), v(1);
  u << 0.5;
  v << 0.5;
  // 1 + (1/24)^2 + 1/720 = 1.003125 (k4(0) = B4(0)/24 = -1/720).
  CHECK(sobolevKernel(u, v) == doctest::Approx(1.003125).epsilon(1e-12));

  RngStream rng(42, 0);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd a(3), b(3);
    for (int c = 0; c < 3; ++c) {
      a(c) = rng.nextUniform();
      b(c) = rng.nextUniform();
    }
    const double kab = sobolevKernel(a, b);
    CHECK(kab == sobolevKernel(b, a));
    double reference = 1.0;
    for (int c = 0; c < 3; ++c)
      reference *= sobolev1dViaBernoulli(a(c), b(c));
    CHECK(kab == doctest::Approx(reference).epsilon(1e-14));
  }

  Eigen::VectorXd bad(1);
  bad << 1.5;
  CHECK_THROWS_AS(sobolevKernel(bad, v), InvalidArgument);
}

TEST_CASE("sobolevKernel Gram matrices are positive semidefinite") {
  RngStream rng(17, 0);
  Eigen::MatrixXd u(20, 3);
  for (int i = 0; i < 20; ++i)
    for (int c = 0; c < 3; ++c) u(i, c) = rng.nextUniform();
  const Eigen::MatrixXd gram = kernels::sobolevGram(u);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  CHECK(solver.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("fitKernelBalance under pure randomization") {
  RngStream rng(2718, 0);
  const int n = 300;
  Eigen::MatrixXd C(n, 3);
  Eigen::VectorXi T(n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) C(i, c) = rng.nextNormal();
    T(i) = rng.nextBernoulli(0.5);
  }
  const int n1 = T.sum();
  const KernelBalanceResult result =
      fitKernelBalance(makeSubstitute(C, 3), T, {1e-6});

  std::vector<double> treated;
  for (int i = 0; i < n; ++i) {
    CHECK(result.treatedWeights(i) >= 0.0);
    CHECK(result.controlWeights(i) >= 0.0);
    if (T(i) == 1) {
      CHECK(result.controlWeights(i) == 0.0);
      treated.push_back(result.treatedWeights(i));
    } else {
      CHECK(result.treatedWeights(i) == 0.0);
    }
  }
  std::nth_element(treated.begin(), treated.begin() + treated.size() / 2,
                   treated.end());
  const double median = treated[treated.size() / 2];
  const double uniform = static_cast<double>(n) / n1;
  CHECK(std::abs(median - uniform) < 0.25 * uniform);
}

TEST_CASE("fitKernelBalance zeroes the imbalance of constant features") {
  const int n = 50;
  Eigen::MatrixXd C = Eigen::MatrixXd::Constant(n, 2, 3.0);
  Eigen::VectorXi T(n);
  for (int i = 0; i < n; ++i) T(i) = i < 20 ? 1 : 0;
  const KernelBalanceResult result =
      fitKernelBalance(makeSubstitute(C, 0), T, {1e-6});
  const double total = result.treatedWeights.sum() / n;
  CHECK(std::abs(total - 1.0) < 1e-3);
}

TEST_CASE("fitKernelBalance with a huge penalty shrinks weights to zero") {
  RngStream rng(5150, 0);
  const int n = 50;
  Eigen::MatrixXd C(n, 2);
  Eigen::VectorXi T(n);
  for (int i = 0; i < n; ++i) {
    C(i, 0) = rng.nextNormal();
    C(i, 1) = rng.nextNormal();
    T(i) = i % 2;
  }
  const SubstituteCovariate sub = makeSubstitute(C, 0);
  const KernelBalanceResult result = fitKernelBalance(sub, T, {1e6});
  CHECK(result.treatedWeights.maxCoeff() < 1e-2);

  // Objective collapses to the imbalance of the zero weight vector, b'Kb.
  Eigen::MatrixXd u = C;
  for (int c = 0; c < 2; ++c) {
    const double lo = C.col(c).minCoeff(), hi = C.col(c).maxCoeff();
    u.col(c) = (C.col(c).array() - lo) / (hi - lo);
  }
  const Eigen::MatrixXd gram = kernels::sobolevGram(u);
  const double bKb = gram.sum() / (static_cast<double>(n) * n);
  CHECK(result.objectiveHistoryTreated.back() ==
        doctest::Approx(bKb).epsilon(0.01));
}

TEST_CASE("fitKernelBalance objective is monotone and permutation-safe") {
  testutil::SimData sim = testutil::makeSimData(1, 1, 60, 808);
  const SubstituteCovariate sub =
      buildSubstitute(sim.data.W, sim.data.X, 0.95);
  const KernelBalanceResult result =
      fitKernelBalance(sub, sim.data.T, defaultLambdaGrid());
  for (std::size_t s = 1; s < result.objectiveHistoryTreated.size(); ++s)
    CHECK(result.objectiveHistoryTreated[s] <
          result.objectiveHistoryTreated[s - 1]);
  for (std::size_t s = 1; s < result.objectiveHistoryControl.size(); ++s)
    CHECK(result.objectiveHistoryControl[s] <
          result.objectiveHistoryControl[s - 1]);

  // Permuting subjects permutes the weights.
  const int n = static_cast<int>(sub.C.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RngStream rng(4, 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.nextIndex(i + 1)]);

  Eigen::MatrixXd permC(n, sub.C.cols());
  Eigen::VectorXi permT(n);
  for (int i = 0; i < n; ++i) {
    permC.row(i) = sub.C.row(perm[i]);
    permT(i) = sim.data.T(perm[i]);
  }
  const KernelBalanceResult permuted = fitKernelBalance(
      makeSubstitute(permC, sub.scoreCount), permT, defaultLambdaGrid());
  for (int i = 0; i < n; ++i) {
    CHECK(permuted.treatedWeights(i) ==
          doctest::Approx(result.treatedWeights(perm[i])).epsilon(1e-6));
    CHECK(permuted.controlWeights(i) ==
          doctest::Approx(result.controlWeights(perm[i])).epsilon(1e-6));
  }
}

TEST_CASE("fitKernelBalance validates its inputs") {
  Eigen::MatrixXd C = Eigen::MatrixXd::Random(20, 2);
  Eigen::VectorXi allTreated = Eigen::VectorXi::Ones(20);
  CHECK_THROWS_AS(
      fitKernelBalance(makeSubstitute(C, 0), allTreated, {1e-3}),
      InvalidArgument);

  Eigen::VectorXi T(20);
  for (int i = 0; i < 20; ++i) T(i) = i % 2;
  CHECK_THROWS_AS(fitKernelBalance(makeSubstitute(C, 0), T, {}),
                  InvalidArgument);
  Eigen::MatrixXd tiny = Eigen::MatrixXd::Random(5, 2);
  Eigen::VectorXi tinyT(5);
  tinyT << 1, 0, 1, 0, 1;
  CHECK_THROWS_AS(fitKernelBalance(makeSubstitute(tiny, 0), tinyT, {1e-3}),
                  InvalidArgument);
}
