#include "funcate/ate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "funcate/errors.hpp"
#include "funcate/parallel.hpp"
#include "funcate/rng.hpp"

namespace funcate {

namespace {

// Shared accumulation core so the direct estimators and the weight-based
// ones agree exactly (same summation order).
struct WeightedSums {
  double treatedWY = 0.0, treatedW = 0.0;
  double controlWY = 0.0, controlW = 0.0;
};

WeightedSums accumulate(const Eigen::VectorXd& y,
                        const Eigen::VectorXd& treatedWeights,
                        const Eigen::VectorXd& controlWeights) {
  WeightedSums s;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    s.treatedWY += treatedWeights(i) * y(i);
    s.treatedW += treatedWeights(i);
    s.controlWY += controlWeights(i) * y(i);
    s.controlW += controlWeights(i);
  }
  return s;
}

void checkSizes(const Eigen::VectorXd& y, const Eigen::VectorXi& T,
                Eigen::Index n) {
  if (y.size() != n || T.size() != n)
    throw InvalidArgument("estimator input size mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (T(i) != 0 && T(i) != 1)
      throw InvalidArgument("treatment must be binary 0/1");
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ipwWeights(
    const Eigen::VectorXi& T, const Eigen::VectorXd& p) {
  const Eigen::Index n = T.size();
  Eigen::VectorXd wt(n), wc(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(p(i) > 0.0 && p(i) < 1.0))
      throw InvalidArgument("propensities must lie strictly in (0, 1)");
    wt(i) = T(i) == 1 ? 1.0 / p(i) : 0.0;
    wc(i) = T(i) == 0 ? 1.0 / (1.0 - p(i)) : 0.0;
  }
  return {std::move(wt), std::move(wc)};
}

}  // namespace

double estimateHt(const Eigen::VectorXd& y, const Eigen::VectorXi& T,
                  const Eigen::VectorXd& p) {
  const Eigen::Index n = p.size();
  checkSizes(y, T, n);
  auto [wt, wc] = ipwWeights(T, p);
  const WeightedSums s = accumulate(y, wt, wc);
  return (s.treatedWY - s.controlWY) / static_cast<double>(n);
}

double estimateHajek(const Eigen::VectorXd& y, const Eigen::VectorXi& T,
                     const Eigen::VectorXd& p) {
  const Eigen::Index n = p.size();
  checkSizes(y, T, n);
  const int n1 = T.sum();
  if (n1 == 0 || n1 == n)
    throw InvalidArgument("estimateHajek needs both arms nonempty");
  auto [wt, wc] = ipwWeights(T, p);
  const WeightedSums s = accumulate(y, wt, wc);
  return s.treatedWY / s.treatedW - s.controlWY / s.controlW;
}

WeightedAte estimateFromWeights(const Eigen::VectorXd& y,
                                const Eigen::VectorXi& T,
                                const Eigen::VectorXd& treatedWeights,
                                const Eigen::VectorXd& controlWeights) {
  const Eigen::Index n = y.size();
  checkSizes(y, T, n);
  if (treatedWeights.size() != n || controlWeights.size() != n)
    throw InvalidArgument("weight vector size mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (treatedWeights(i) < 0.0 || controlWeights(i) < 0.0)
      throw InvalidArgument("weights must be nonnegative");
    if (T(i) == 0 && treatedWeights(i) != 0.0)
      throw InvalidArgument("treated weights must vanish on controls");
    if (T(i) == 1 && controlWeights(i) != 0.0)
      throw InvalidArgument("control weights must vanish on treated");
  }
  const WeightedSums s = accumulate(y, treatedWeights, controlWeights);
  WeightedAte out;
  out.ht = (s.treatedWY - s.controlWY) / static_cast<double>(n);
  if (s.treatedW <= 0.0 || s.controlW <= 0.0)
    throw InvalidArgument("Hajek needs positive weight sums in both arms");
  out.hajek = s.treatedWY / s.treatedW - s.controlWY / s.controlW;
  return out;
}

double interpolatedQuantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0))
    throw InvalidArgument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

AteEstimate bootstrapImpl(
    int n, const WeightedAte& pointEstimate, int B, std::uint64_t seed,
    const std::function<std::optional<WeightedAte>(const std::vector<int>&)>&
        refit) {
  if (B < 100) throw InvalidArgument("bootstrap needs B >= 100");
  if (n < 1) throw InvalidArgument("bootstrap needs n >= 1");

  std::vector<std::optional<WeightedAte>> results(B);
  parallelFor(B, [&](int b) {
    RngStream rng(seed, static_cast<std::uint64_t>(b));
    std::vector<int> indices(n);
    for (int i = 0; i < n; ++i)
      indices[i] = static_cast<int>(rng.nextIndex(n));
    results[b] = refit(indices);
  });

  AteEstimate out;
  out.ht = pointEstimate.ht;
  out.hajek = pointEstimate.hajek;
  out.requestedResamples = B;
  for (int b = 0; b < B; ++b) {
    if (results[b].has_value()) {
      out.htDraws.push_back(results[b]->ht);
      out.hajekDraws.push_back(results[b]->hajek);
    } else {
      ++out.failedResamples;
    }
  }
  if (out.failedResamples > 0.2 * B)
    throw BootstrapUnstable("more than 20% of bootstrap resamples failed");

  const auto sd = [](const std::vector<double>& draws) {
    const double mean =
        std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
    double ss = 0.0;
    for (double d : draws) ss += (d - mean) * (d - mean);
    return std::sqrt(ss / (draws.size() - 1.0));
  };
  out.se = std::make_pair(sd(out.htDraws), sd(out.hajekDraws));
  out.ci95 = std::make_pair(
      std::array<double, 2>{interpolatedQuantile(out.htDraws, 0.025),
                            interpolatedQuantile(out.htDraws, 0.975)},
      std::array<double, 2>{interpolatedQuantile(out.hajekDraws, 0.025),
                            interpolatedQuantile(out.hajekDraws, 0.975)});
  return out;
}

}  // namespace funcate
