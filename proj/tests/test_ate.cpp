#include <cmath>
#include <vector>

#include <doctest.h>

#include "funcate/analysis.hpp"
#include "funcate/ate.hpp"
#include "funcate/errors.hpp"
#include "funcate/rng.hpp"

#include "test_util.hpp"

using namespace funcate;

TEST_CASE("estimateHt examples") {
  Eigen::VectorXd y(2);
  Eigen::VectorXi T(2);
  Eigen::VectorXd p(2);
  y << 3, 1;
  T << 1, 0;
  p << 0.5, 0.5;
  CHECK(estimateHt(y, T, p) == doctest::Approx(2.0).epsilon(0));

  // Degenerate arm: all treated with constant outcome c and p = 0.5.
  Eigen::VectorXd yc = Eigen::VectorXd::Constant(5, 4.0);
  Eigen::VectorXi allT = Eigen::VectorXi::Ones(5);
  Eigen::VectorXd half = Eigen::VectorXd::Constant(5, 0.5);
  CHECK(estimateHt(yc, allT, half) == doctest::Approx(8.0).epsilon(1e-14));

  Eigen::VectorXd bad(2);
  bad << 1.0, 0.5;
  CHECK_THROWS_AS(estimateHt(y, T, bad), InvalidArgument);
}

TEST_CASE("estimateHajek examples") {
  RngStream rng(12, 0);
  const int n = 30;
  Eigen::VectorXd y(n);
  Eigen::VectorXi T(n);
  for (int i = 0; i < n; ++i) {
    y(i) = rng.nextNormal() * 3.0 + 1.0;
    T(i) = i % 3 == 0 ? 1 : 0;
  }
  // Constant propensity: exactly the difference of arm means.
  Eigen::VectorXd constP = Eigen::VectorXd::Constant(n, 0.37);
  double meanT = 0.0, meanC = 0.0;
  int n1 = 0;
  for (int i = 0; i < n; ++i) {
    if (T(i) == 1) {
      meanT += y(i);
      ++n1;
    } else {
      meanC += y(i);
    }
  }
  meanT /= n1;
  meanC /= (n - n1);
  CHECK(std::abs(estimateHajek(y, T, constP) - (meanT - meanC)) <= 1e-12);

  Eigen::VectorXd y2(2);
  Eigen::VectorXi T2(2);
  Eigen::VectorXd p2(2);
  y2 << 3, 1;
  T2 << 1, 0;
  p2 << 0.9, 0.2;
  CHECK(estimateHajek(y2, T2, p2) == doctest::Approx(2.0).epsilon(1e-14));

  Eigen::VectorXi empty = Eigen::VectorXi::Zero(2);
  CHECK_THROWS_AS(estimateHajek(y2, empty, p2), InvalidArgument);
}

TEST_CASE("estimateFromWeights matches the direct estimators exactly") {
  RngStream rng(77, 0);
  const int n = 41;
  Eigen::VectorXd y(n), p(n);
  Eigen::VectorXi T(n);
  for (int i = 0; i < n; ++i) {
    y(i) = 10.0 * rng.nextNormal();
    p(i) = 0.05 + 0.9 * rng.nextUniform();
    T(i) = rng.nextBernoulli(p(i));
  }
  if (T.sum() == 0) T(0) = 1;
  if (T.sum() == n) T(0) = 0;

  Eigen::VectorXd wt(n), wc(n);
  for (int i = 0; i < n; ++i) {
    wt(i) = T(i) == 1 ? 1.0 / p(i) : 0.0;
    wc(i) = T(i) == 0 ? 1.0 / (1.0 - p(i)) : 0.0;
  }
  const WeightedAte viaWeights = estimateFromWeights(y, T, wt, wc);
  CHECK(viaWeights.ht == estimateHt(y, T, p));
  CHECK(viaWeights.hajek == estimateHajek(y, T, p));

  // Hajek is invariant to rescaling each arm's weights.
  const WeightedAte rescaled = estimateFromWeights(y, T, 7.0 * wt, 3.0 * wc);
  CHECK(std::abs(rescaled.hajek - viaWeights.hajek) <= 1e-12);

  // Uniform weights give the difference of arm means.
  const int n1 = T.sum();
  Eigen::VectorXd ut(n), uc(n);
  for (int i = 0; i < n; ++i) {
    ut(i) = T(i) == 1 ? static_cast<double>(n) / n1 : 0.0;
    uc(i) = T(i) == 0 ? static_cast<double>(n) / (n - n1) : 0.0;
  }
  double meanT = 0.0, meanC = 0.0;
  for (int i = 0; i < n; ++i)
    (T(i) == 1 ? meanT : meanC) += y(i);
  meanT /= n1;
  meanC /= (n - n1);
  CHECK(std::abs(estimateFromWeights(y, T, ut, uc).hajek -
                 (meanT - meanC)) <= 1e-12);

  // All-zero control weights: the Hajek ratio is undefined.
  CHECK_THROWS_AS(estimateFromWeights(y, T, wt, Eigen::VectorXd::Zero(n)),
                  InvalidArgument);
  // Support violation.
  CHECK_THROWS_AS(estimateFromWeights(y, T, wc, wt), InvalidArgument);
}

TEST_CASE("HT and Hajek coincide at the arm-share propensity") {
  RngStream rng(31, 0);
  const int n = 24;
  Eigen::VectorXd y(n);
  Eigen::VectorXi T(n);
  for (int i = 0; i < n; ++i) {
    y(i) = rng.nextNormal();
    T(i) = i < 9 ? 1 : 0;
  }
  const double share = 9.0 / 24.0;
  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, share);
  double meanT = 0.0, meanC = 0.0;
  for (int i = 0; i < n; ++i)
    (T(i) == 1 ? meanT : meanC) += y(i);
  meanT /= 9.0;
  meanC /= 15.0;
  CHECK(std::abs(estimateHt(y, T, p) - (meanT - meanC)) <= 1e-12);
  CHECK(std::abs(estimateHajek(y, T, p) - (meanT - meanC)) <= 1e-12);
}

TEST_CASE("interpolatedQuantile matches the hand-computed example") {
  std::vector<double> draws(100);
  for (int i = 0; i < 100; ++i) draws[i] = i + 1.0;
  CHECK(interpolatedQuantile(draws, 0.025) ==
        doctest::Approx(3.475).epsilon(1e-12));
  CHECK(interpolatedQuantile(draws, 0.975) ==
        doctest::Approx(97.525).epsilon(1e-12));
  CHECK(interpolatedQuantile(draws, 0.0) == 1.0);
  CHECK(interpolatedQuantile(draws, 1.0) == 100.0);
}

TEST_CASE("bootstrapImpl on a constant statistic") {
  const WeightedAte point{3.25, 3.25};
  const auto refit = [](const std::vector<int>&) {
    return std::optional<WeightedAte>(WeightedAte{3.25, 3.25});
  };
  const AteEstimate est = bootstrapImpl(40, point, 200, 9, refit);
  CHECK(est.se->first == 0.0);
  CHECK(est.se->second == 0.0);
  CHECK(est.ci95->first[0] == 3.25);
  CHECK(est.ci95->first[1] == 3.25);
  CHECK(est.failedResamples == 0);
}

TEST_CASE("bootstrapImpl drops failures and throws past 20%") {
  const WeightedAte point{0.0, 0.0};
  // Deterministic failure pattern keyed on the first resampled index.
  const auto flaky = [](const std::vector<int>& idx)
      -> std::optional<WeightedAte> {
    if (idx[0] % 10 < 3) return std::nullopt;  // ~30% failures
    return WeightedAte{static_cast<double>(idx[0]), 0.0};
  };
  CHECK_THROWS_AS(bootstrapImpl(1000, point, 200, 3, flaky),
                  BootstrapUnstable);

  const auto rare = [](const std::vector<int>& idx)
      -> std::optional<WeightedAte> {
    if (idx[0] % 10 == 0) return std::nullopt;  // ~10% failures
    return WeightedAte{static_cast<double>(idx[0]), 1.0};
  };
  const AteEstimate est = bootstrapImpl(1000, point, 200, 3, rare);
  CHECK(est.failedResamples > 0);
  CHECK(est.failedResamples <= 40);
  CHECK(static_cast<int>(est.htDraws.size()) + est.failedResamples == 200);
}

TEST_CASE("bootstrapEstimate is deterministic given the seed") {
  testutil::SimData sim = testutil::makeSimData(1, 1, 120, 64);
  MethodSpec spec;
  spec.method = Method::Gfplm;
  const AteEstimate a = bootstrapEstimate(sim.data, spec, 100, 2024);
  const AteEstimate b = bootstrapEstimate(sim.data, spec, 100, 2024);
  REQUIRE(a.htDraws.size() == b.htDraws.size());
  for (std::size_t i = 0; i < a.htDraws.size(); ++i) {
    CHECK(a.htDraws[i] == b.htDraws[i]);
    CHECK(a.hajekDraws[i] == b.hajekDraws[i]);
  }
  CHECK(a.se->first == b.se->first);
  CHECK(a.ci95->second[0] == b.ci95->second[0]);
  CHECK(a.ci95->second[0] <= a.ci95->second[1]);
  CHECK(a.ci95->first[0] <= a.ci95->first[1]);

  const AteEstimate c = bootstrapEstimate(sim.data, spec, 100, 2025);
  bool anyDifferent = false;
  for (std::size_t i = 0; i < a.htDraws.size(); ++i)
    if (a.htDraws[i] != c.htDraws[i]) anyDifferent = true;
  CHECK(anyDifferent);
}

TEST_CASE("bootstrapImpl validates B") {
  const auto refit = [](const std::vector<int>&) {
    return std::optional<WeightedAte>(WeightedAte{0.0, 0.0});
  };
  CHECK_THROWS_AS(bootstrapImpl(10, WeightedAte{}, 50, 1, refit),
                  InvalidArgument);
}
