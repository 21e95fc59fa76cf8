#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "funcate/grid.hpp"
#include "funcate/kernels.hpp"
#include "funcate/propensity.hpp"

namespace funcate {

// Multivariate substitute for the functional covariate:
// C = [W | leading FPC scores], with per-column min/max recorded for the
// kernel-balancing scaling.
struct SubstituteCovariate {
  Eigen::MatrixXd C;  // n x (q + L)
  std::vector<std::pair<double, double>> columnScales;  // (min, max)
  int scoreCount = 0;
};

// Records column scales for an already-assembled C.
SubstituteCovariate makeSubstitute(Eigen::MatrixXd C, int scoreCount);

// FPCA fit + FVE selection, then C = [W | scores_1..L].
SubstituteCovariate buildSubstitute(const Eigen::MatrixXd& W,
                                    const GridFunctionSample& sample,
                                    double fveThreshold);

// Same assembly with an externally chosen truncation level.
SubstituteCovariate substituteFromModel(const Eigen::MatrixXd& W,
                                        const FpcaModel& model, int L);

struct BalanceSpec {
  int momentOrder = 1;  // 1: balance C; 2: balance C and entrywise C^2
};

// Rows h~(C_i) = (1, h(C_i)): [1 | C] or [1 | C | C^2].
Eigen::MatrixXd balanceDesign(const Eigen::MatrixXd& C,
                              const BalanceSpec& spec);

// (1/n) sum_i { T_i/p_i - (1-T_i)/(1-p_i) } h~(C_i).
Eigen::VectorXd balanceResidual(const Eigen::MatrixXd& design,
                                const Eigen::VectorXi& T,
                                const Eigen::VectorXd& p);

// Covariate balancing propensity score, just-identified: a logistic model
// on [1 | h(C)] whose coefficients drive the balancing equations to zero
// (damped Newton with line search on ||G||^2, initialized at the plain
// MLE). Converged when ||G||_inf < 1e-8; throws BalanceNotAttained after
// 200 steps otherwise.
PropensityFit fitCbps(const SubstituteCovariate& sub, const Eigen::VectorXi& T,
                      const BalanceSpec& spec);

using kernels::sobolevKernel;

struct KernelBalanceResult {
  Eigen::VectorXd treatedWeights;  // zero at controls
  Eigen::VectorXd controlWeights;  // zero at treated
  double lambdaTreated = 0.0;
  double lambdaControl = 0.0;
  // (a-b)' K (a-b) at the selected solution, per arm.
  double imbalanceTreated = 0.0;
  double imbalanceControl = 0.0;
  bool convergedTreated = false;
  bool convergedControl = false;
  int iterationsTreated = 0;
  int iterationsControl = 0;
  // Objective after each accepted projected-gradient step for the selected
  // lambda (nonincreasing by construction).
  std::vector<double> objectiveHistoryTreated;
  std::vector<double> objectiveHistoryControl;
};

// Nonnegative per-arm weights minimizing the squared worst-case imbalance
// of the scaled substitute covariate over the unit ball of the Sobolev
// RKHS, plus lambda * (1/n) * sum of squared arm weights. Solved by
// projected gradient with backtracking from w = n/n_arm; lambda picked from
// the grid by minimizing imbalance + unpenalized weight norm at the
// solution. Nonconvergence is reported via the flags, not thrown.
KernelBalanceResult fitKernelBalance(const SubstituteCovariate& sub,
                                     const Eigen::VectorXi& T,
                                     const std::vector<double>& lambdaGrid);

// {1e-6, 1e-5, ..., 1}
std::vector<double> defaultLambdaGrid();

}  // namespace funcate
