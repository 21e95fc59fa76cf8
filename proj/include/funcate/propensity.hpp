#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "funcate/basis.hpp"
#include "funcate/fpca.hpp"
#include "funcate/grid.hpp"

namespace funcate {

enum class Method { Gfplm, Fgam, Cbps1, Cbps2, Kbcb };

const char* methodName(Method method);
std::optional<Method> methodFromName(std::string_view name);

// Truncation-level rule for the FPC scores.
struct Selection {
  enum class Rule { Fve, Aic, Fixed };
  Rule rule = Rule::Fve;
  double fveThreshold = 0.95;
  int fixedL = 0;

  static Selection fve(double threshold) {
    return Selection{Rule::Fve, threshold, 0};
  }
  static Selection aic() { return Selection{Rule::Aic, 0.0, 0}; }
  static Selection fixed(int L) { return Selection{Rule::Fixed, 0.0, L}; }
};

// Fitted propensities are clipped into [kPropensityClip, 1-kPropensityClip]
// so no inverse weight can exceed 1e6.
inline constexpr double kPropensityClip = 1e-6;

struct PropensityFit {
  Method method = Method::Gfplm;
  // Exactly one of the two is present: KBCB yields arm weights, everything
  // else yields per-subject propensities.
  std::optional<Eigen::VectorXd> propensities;
  std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>
      armWeights;  // (treated, control)
  bool converged = false;
  std::optional<double> balanceResidual;  // max-norm of Eq-style residual
  int selectedL = 0;
};

// Resolves a Selection rule against a fitted FPCA model (W and T are needed
// for the AIC rule). Throws InvalidSelection for L < 1 or L > K.
int resolveSelection(const Selection& selection, const FpcaModel& model,
                     const Eigen::MatrixXd& W, const Eigen::VectorXi& T);

// Logistic propensity with linear functional term: design [1 | W | scores],
// truncation level from the selection rule. Degenerate trajectories with no
// covariance modes fall back to the W-only design.
PropensityFit fitGfplm(const Eigen::MatrixXd& W,
                       const GridFunctionSample& sample,
                       const Eigen::VectorXi& T, const Selection& selection);

// Logistic propensity with an additive surface term: per-subject features
// integrate a 7x7 cubic B-spline tensor surface along the trajectory, fit
// by ridge-stabilized IRLS (ridge 1e-6 on non-intercept terms).
PropensityFit fitFgam(const Eigen::MatrixXd& W,
                      const GridFunctionSample& sample,
                      const Eigen::VectorXi& T);

// FGAM feature rows: F_i[(j,l)] = sum_g w_g B_j(t_g) Bx_l(X_i(t_g)).
Eigen::MatrixXd fgamFeatures(const GridFunctionSample& sample,
                             const BsplineBasis& timeBasis,
                             const BsplineBasis& valueBasis);

}  // namespace funcate
