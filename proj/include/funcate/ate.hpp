#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace funcate {

// Horvitz-Thompson: (1/n) sum { T_i Y_i / p_i - (1-T_i) Y_i / (1-p_i) }.
// p must lie strictly inside (0, 1).
double estimateHt(const Eigen::VectorXd& y, const Eigen::VectorXi& T,
                  const Eigen::VectorXd& p);

// Hajek: arm-wise normalized inverse propensity weighting. Both arms must
// be nonempty.
double estimateHajek(const Eigen::VectorXd& y, const Eigen::VectorXi& T,
                     const Eigen::VectorXd& p);

struct WeightedAte {
  double ht = 0.0;
  double hajek = 0.0;
};

// HT and Hajek from explicit arm weights (nonnegative, supported on the
// matching arm). Equals the direct estimators exactly when the weights are
// T_i/p_i and (1-T_i)/(1-p_i). Throws InvalidArgument when an arm's weight
// sum is zero (the Hajek ratio is undefined).
WeightedAte estimateFromWeights(const Eigen::VectorXd& y,
                                const Eigen::VectorXi& T,
                                const Eigen::VectorXd& treatedWeights,
                                const Eigen::VectorXd& controlWeights);

// Empirical quantile with linear interpolation between order statistics
// (h = (n-1) q + 1 on the sorted sample).
double interpolatedQuantile(std::vector<double> values, double q);

struct AteEstimate {
  double ht = 0.0;
  double hajek = 0.0;
  std::optional<std::pair<double, double>> se;  // (HT, Hajek)
  std::optional<std::pair<std::array<double, 2>, std::array<double, 2>>>
      ci95;  // (HT interval, Hajek interval)
  std::vector<double> htDraws;
  std::vector<double> hajekDraws;
  int requestedResamples = 0;
  int failedResamples = 0;
};

// Percentile bootstrap over resamples of n subjects with replacement.
// refit receives the resampled indices and returns nullopt when that
// resample's fit fails; failed resamples are dropped and counted. Draw b
// uses the RNG stream (seed, b), so output is deterministic for a given
// seed regardless of thread count. Throws BootstrapUnstable when more than
// 20% of resamples fail. B >= 100.
AteEstimate bootstrapImpl(
    int n, const WeightedAte& pointEstimate, int B, std::uint64_t seed,
    const std::function<std::optional<WeightedAte>(const std::vector<int>&)>&
        refit);

}  // namespace funcate
