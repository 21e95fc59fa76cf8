#include "funcate/balance.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "funcate/errors.hpp"
#include "funcate/logistic.hpp"

namespace funcate {

SubstituteCovariate makeSubstitute(Eigen::MatrixXd C, int scoreCount) {
  if (C.rows() < 1) throw InvalidArgument("substitute needs subjects");
  std::vector<std::pair<double, double>> scales;
  scales.reserve(C.cols());
  for (Eigen::Index c = 0; c < C.cols(); ++c)
    scales.emplace_back(C.col(c).minCoeff(), C.col(c).maxCoeff());
  return SubstituteCovariate{std::move(C), std::move(scales), scoreCount};
}

SubstituteCovariate substituteFromModel(const Eigen::MatrixXd& W,
                                        const FpcaModel& model, int L) {
  const Eigen::Index n = model.scores.rows();
  const Eigen::Index q = W.cols();
  if (q > 0 && W.rows() != n)
    throw InvalidArgument("substitute W size mismatch");
  if (L < 1 || L > model.componentCount())
    throw InvalidSelection("substitute truncation level out of range");
  Eigen::MatrixXd C(n, q + L);
  if (q > 0) C.leftCols(q) = W;
  C.rightCols(L) = model.scores.leftCols(L);
  return makeSubstitute(std::move(C), L);
}

SubstituteCovariate buildSubstitute(const Eigen::MatrixXd& W,
                                    const GridFunctionSample& sample,
                                    double fveThreshold) {
  if (sample.n() < 2)
    throw InsufficientData("buildSubstitute needs at least 2 subjects");
  const int maxComp = static_cast<int>(
      std::min<Eigen::Index>(sample.n() - 1, sample.m()));
  FpcaModel model = fitFpca(sample, maxComp);
  const int L = selectByFve(model, fveThreshold);
  return substituteFromModel(W, model, L);
}

Eigen::MatrixXd balanceDesign(const Eigen::MatrixXd& C,
                              const BalanceSpec& spec) {
  if (spec.momentOrder != 1 && spec.momentOrder != 2)
    throw InvalidArgument("momentOrder must be 1 or 2");
  const Eigen::Index n = C.rows();
  const Eigen::Index p = C.cols();
  Eigen::MatrixXd design(n, 1 + p * spec.momentOrder);
  design.col(0).setOnes();
  if (p > 0) {
    design.middleCols(1, p) = C;
    if (spec.momentOrder == 2)
      design.rightCols(p) = C.array().square().matrix();
  }
  return design;
}

Eigen::VectorXd balanceResidual(const Eigen::MatrixXd& design,
                                const Eigen::VectorXi& T,
                                const Eigen::VectorXd& p) {
  const Eigen::Index n = design.rows();
  if (T.size() != n || p.size() != n)
    throw InvalidArgument("balanceResidual size mismatch");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(design.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double f =
        T(i) == 1 ? 1.0 / p(i) : -1.0 / (1.0 - p(i));
    g += f * design.row(i).transpose();
  }
  return g / static_cast<double>(n);
}

PropensityFit fitCbps(const SubstituteCovariate& sub, const Eigen::VectorXi& T,
                      const BalanceSpec& spec) {
  const Eigen::MatrixXd design = balanceDesign(sub.C, spec);
  const Eigen::Index n = design.rows();
  const Eigen::Index d = design.cols();
  if (T.size() != n) throw InvalidArgument("fitCbps size mismatch");
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < d) throw SingularDesign("balance design rank deficient");
  }

  // Model probabilities; guarded away from exact 0/1 for the divisions.
  const auto probs = [&](const Eigen::VectorXd& gamma) {
    Eigen::VectorXd p = (design * gamma).unaryExpr([](double e) {
      return sigmoid(e);
    });
    return p.cwiseMax(1e-12).cwiseMin(1.0 - 1e-12).eval();
  };
  const auto residual = [&](const Eigen::VectorXd& p) {
    return balanceResidual(design, T, p);
  };

  LogisticFit mle = fitLogisticMle(design, T);
  Eigen::VectorXd gamma = mle.coefficients;
  Eigen::VectorXd p = probs(gamma);
  Eigen::VectorXd g = residual(p);

  bool converged = g.cwiseAbs().maxCoeff() < 1e-8;
  for (int step = 0; step < 200 && !converged; ++step) {
    // Jacobian of G: -(1/n) sum_i [T(1-p)/p + (1-T)p/(1-p)] x_i x_i'.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = T(i) == 1 ? (1.0 - p(i)) / p(i)
                                 : p(i) / (1.0 - p(i));
      jac.noalias() -=
          s * design.row(i).transpose() * design.row(i);
    }
    jac /= static_cast<double>(n);

    Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(-g);
    if (!delta.allFinite())
      throw BalanceNotAttained("CBPS Newton step not solvable");

    const double normSq = g.squaredNorm();
    double scale = 1.0;
    bool improved = false;
    Eigen::VectorXd gammaNew, pNew, gNew;
    for (int h = 0; h < 40; ++h) {
      gammaNew = gamma + scale * delta;
      pNew = probs(gammaNew);
      gNew = residual(pNew);
      if (gNew.squaredNorm() < normSq) {
        improved = true;
        break;
      }
      scale /= 2.0;
    }
    if (!improved) break;

    gamma = gammaNew;
    p = pNew;
    g = gNew;
    converged = g.cwiseAbs().maxCoeff() < 1e-8;
  }
  if (!converged)
    throw BalanceNotAttained("CBPS balancing equations not solved");

  PropensityFit out;
  out.method = spec.momentOrder == 1 ? Method::Cbps1 : Method::Cbps2;
  Eigen::VectorXd clipped = p.cwiseMax(kPropensityClip)
                                .cwiseMin(1.0 - kPropensityClip);
  out.balanceResidual =
      balanceResidual(design, T, clipped).cwiseAbs().maxCoeff();
  out.propensities = std::move(clipped);
  out.converged = true;
  out.selectedL = sub.scoreCount;
  return out;
}

std::vector<double> defaultLambdaGrid() {
  return {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
}

namespace {

// Scale each column into [0, 1] by the recorded min/max; constant columns
// map to 0.5.
Eigen::MatrixXd scaleToUnitCube(const SubstituteCovariate& sub) {
  Eigen::MatrixXd u = sub.C;
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    const auto [lo, hi] = sub.columnScales[c];
    const double range = hi - lo;
    if (range > 0.0)
      u.col(c) = ((u.col(c).array() - lo) / range)
                     .cwiseMax(0.0)
                     .cwiseMin(1.0);
    else
      u.col(c).setConstant(0.5);
  }
  return u;
}

struct ArmSolve {
  Eigen::VectorXd weights;  // arm-local
  double imbalance = 0.0;
  double penaltyUnit = 0.0;  // (1/n) sum w^2
  bool converged = false;
  int iterations = 0;
  std::vector<double> objectiveHistory;
};

// Minimize J(w) = (a-b)'K(a-b) + (lambda/n)||w||^2 over w >= 0 supported on
// the arm, where a = (arm indicator .* w)/n and b = 1/n. In arm-local terms
// J(w) = (w'K_AA w - 2 c'w + 1'K1)/n^2 + (lambda/n)||w||^2 with
// c = rowsums of K over the arm rows.
ArmSolve solveArm(const Eigen::MatrixXd& kArm, const Eigen::VectorXd& c,
                  double total, Eigen::Index n, double lambda) {
  const Eigen::Index nA = kArm.rows();
  const double invN2 = 1.0 / (static_cast<double>(n) * n);

  const auto quad = [&](const Eigen::VectorXd& w, const Eigen::VectorXd& kw) {
    return (w.dot(kw) - 2.0 * c.dot(w) + total) * invN2 +
           lambda / n * w.squaredNorm();
  };

  ArmSolve out;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(
      nA, static_cast<double>(n) / static_cast<double>(nA));
  Eigen::VectorXd kw = kernels::symMatvec(kArm, w);
  double obj = quad(w, kw);
  out.objectiveHistory.push_back(obj);

  // Initial step from a Gershgorin bound on the quadratic's curvature.
  const double rowBound = kArm.cwiseAbs().rowwise().sum().maxCoeff();
  double step = 1.0 / (2.0 * invN2 * rowBound + 2.0 * lambda / n);

  for (int it = 1; it <= 5000; ++it) {
    out.iterations = it;
    Eigen::VectorXd grad =
        2.0 * invN2 * (kw - c) + (2.0 * lambda / n) * w;

    bool accepted = false;
    Eigen::VectorXd wNew, kwNew;
    double objNew = obj;
    for (int h = 0; h < 60; ++h) {
      wNew = (w - step * grad).cwiseMax(0.0);
      if ((wNew.array() == w.array()).all()) break;  // stationary
      kwNew = kernels::symMatvec(kArm, wNew);
      objNew = quad(wNew, kwNew);
      if (objNew < obj) {
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) {
      out.converged = true;  // no descent direction left
      break;
    }

    assert(objNew < obj);
    const double relChange =
        (obj - objNew) / std::max(std::abs(obj), 1e-12);
    w = std::move(wNew);
    kw = std::move(kwNew);
    obj = objNew;
    out.objectiveHistory.push_back(obj);
    step *= 2.0;

    if (relChange < 1e-9) {
      out.converged = true;
      break;
    }
  }

  out.weights = std::move(w);
  out.imbalance =
      (out.weights.dot(kw) - 2.0 * c.dot(out.weights) + total) * invN2;
  out.penaltyUnit = out.weights.squaredNorm() / static_cast<double>(n);
  return out;
}

}  // namespace

KernelBalanceResult fitKernelBalance(const SubstituteCovariate& sub,
                                     const Eigen::VectorXi& T,
                                     const std::vector<double>& lambdaGrid) {
  const Eigen::Index n = sub.C.rows();
  if (T.size() != n) throw InvalidArgument("fitKernelBalance size mismatch");
  if (n < 10) throw InvalidArgument("fitKernelBalance needs n >= 10");
  if (lambdaGrid.empty())
    throw InvalidArgument("lambda grid must be nonempty");
  for (double l : lambdaGrid)
    if (!(l > 0.0)) throw InvalidArgument("lambda values must be positive");
  const int n1 = T.sum();
  if (n1 == 0 || n1 == n) throw InvalidArgument("both arms must be nonempty");

  const Eigen::MatrixXd u = scaleToUnitCube(sub);
  const Eigen::MatrixXd gram = kernels::sobolevGram(u);
  const Eigen::VectorXd rowSums = gram.rowwise().sum();
  const double total = rowSums.sum();

  KernelBalanceResult result;
  result.treatedWeights = Eigen::VectorXd::Zero(n);
  result.controlWeights = Eigen::VectorXd::Zero(n);

  for (int arm = 0; arm < 2; ++arm) {
    const int want = arm == 0 ? 1 : 0;
    std::vector<Eigen::Index> idx;
    idx.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i)
      if (T(i) == want) idx.push_back(i);
    const Eigen::Index nA = static_cast<Eigen::Index>(idx.size());

    Eigen::MatrixXd kArm(nA, nA);
    Eigen::VectorXd c(nA);
    for (Eigen::Index a = 0; a < nA; ++a) {
      c(a) = rowSums(idx[a]);
      for (Eigen::Index b2 = 0; b2 < nA; ++b2)
        kArm(a, b2) = gram(idx[a], idx[b2]);
    }

    int best = -1;
    double bestScore = std::numeric_limits<double>::infinity();
    std::vector<ArmSolve> solves;
    solves.reserve(lambdaGrid.size());
    for (std::size_t li = 0; li < lambdaGrid.size(); ++li) {
      solves.push_back(solveArm(kArm, c, total, n, lambdaGrid[li]));
      const double score =
          solves.back().imbalance + solves.back().penaltyUnit;
      if (score < bestScore) {
        bestScore = score;
        best = static_cast<int>(li);
      }
    }

    ArmSolve& chosen = solves[best];
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < nA; ++a) full(idx[a]) = chosen.weights(a);

    if (arm == 0) {
      result.treatedWeights = std::move(full);
      result.lambdaTreated = lambdaGrid[best];
      result.imbalanceTreated = chosen.imbalance;
      result.convergedTreated = chosen.converged;
      result.iterationsTreated = chosen.iterations;
      result.objectiveHistoryTreated = std::move(chosen.objectiveHistory);
    } else {
      result.controlWeights = std::move(full);
      result.lambdaControl = lambdaGrid[best];
      result.imbalanceControl = chosen.imbalance;
      result.convergedControl = chosen.converged;
      result.iterationsControl = chosen.iterations;
      result.objectiveHistoryControl = std::move(chosen.objectiveHistory);
    }
  }
  return result;
}

}  // namespace funcate
