#include "funcate/propensity.hpp"

#include <algorithm>
#include <cmath>

#include "funcate/errors.hpp"
#include "funcate/logistic.hpp"

namespace funcate {

const char* methodName(Method method) {
  switch (method) {
    case Method::Gfplm: return "GFPLM";
    case Method::Fgam: return "FGAM";
    case Method::Cbps1: return "CBPS1";
    case Method::Cbps2: return "CBPS2";
    case Method::Kbcb: return "KBCB";
  }
  return "?";
}

std::optional<Method> methodFromName(std::string_view name) {
  if (name == "GFPLM") return Method::Gfplm;
  if (name == "FGAM") return Method::Fgam;
  if (name == "CBPS1") return Method::Cbps1;
  if (name == "CBPS2") return Method::Cbps2;
  if (name == "KBCB") return Method::Kbcb;
  return std::nullopt;
}

int resolveSelection(const Selection& selection, const FpcaModel& model,
                     const Eigen::MatrixXd& W, const Eigen::VectorXi& T) {
  int L = 0;
  switch (selection.rule) {
    case Selection::Rule::Fve:
      L = selectByFve(model, selection.fveThreshold);
      break;
    case Selection::Rule::Aic:
      L = selectByAic(model.scores, W, T);
      break;
    case Selection::Rule::Fixed:
      L = selection.fixedL;
      break;
  }
  if (L < 1) throw InvalidSelection("selection produced L = 0");
  if (L > model.componentCount())
    throw InvalidSelection("selection exceeds retained components");
  return L;
}

namespace {

Eigen::VectorXd clipPropensities(const Eigen::VectorXd& fitted) {
  return fitted.unaryExpr([](double p) {
    return std::min(std::max(p, kPropensityClip), 1.0 - kPropensityClip);
  });
}

}  // namespace

PropensityFit fitGfplm(const Eigen::MatrixXd& W,
                       const GridFunctionSample& sample,
                       const Eigen::VectorXi& T, const Selection& selection) {
  const Eigen::Index n = sample.n();
  const Eigen::Index q = W.cols();
  if ((q > 0 && W.rows() != n) || T.size() != n)
    throw InvalidArgument("fitGfplm size mismatch");

  int L = 0;
  Eigen::MatrixXd scores;
  try {
    const int maxComp =
        static_cast<int>(std::min<Eigen::Index>(n - 1, sample.m()));
    FpcaModel model = fitFpca(sample, maxComp);
    L = resolveSelection(selection, model, W, T);
    scores = model.scores.leftCols(L);
  } catch (const InsufficientComponents&) {
    L = 0;  // degenerate trajectories: W-only model
  }

  if (n < q + L + 1)
    throw InsufficientData("fitGfplm: n < q + L + 1 after selection");

  Eigen::MatrixXd design(n, 1 + q + L);
  design.col(0).setOnes();
  if (q > 0) design.middleCols(1, q) = W;
  if (L > 0) design.rightCols(L) = scores;

  LogisticFit fit = fitLogisticMle(design, T);
  PropensityFit out;
  out.method = Method::Gfplm;
  out.propensities = clipPropensities(fit.fitted);
  out.converged = fit.converged;
  out.selectedL = L;
  return out;
}

Eigen::MatrixXd fgamFeatures(const GridFunctionSample& sample,
                             const BsplineBasis& timeBasis,
                             const BsplineBasis& valueBasis) {
  const Eigen::Index n = sample.n();
  const Eigen::Index m = sample.m();
  const int pt = timeBasis.count();
  const int px = valueBasis.count();

  // Time-margin basis values are shared by all subjects.
  Eigen::MatrixXd bt(m, pt);
  for (Eigen::Index g = 0; g < m; ++g)
    bt.row(g) = bsplineEval(timeBasis, sample.grid.points(g)).transpose();

  Eigen::MatrixXd features = Eigen::MatrixXd::Zero(n, pt * px);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index g = 0; g < m; ++g) {
      const Eigen::VectorXd bx = bsplineEval(valueBasis, sample.values(i, g));
      const double w = sample.grid.weights(g);
      for (int j = 0; j < pt; ++j) {
        const double wbt = w * bt(g, j);
        if (wbt == 0.0) continue;
        for (int l = 0; l < px; ++l)
          features(i, j * px + l) += wbt * bx(l);
      }
    }
  }
  return features;
}

PropensityFit fitFgam(const Eigen::MatrixXd& W,
                      const GridFunctionSample& sample,
                      const Eigen::VectorXi& T) {
  const Eigen::Index n = sample.n();
  const Eigen::Index q = W.cols();
  if ((q > 0 && W.rows() != n) || T.size() != n)
    throw InvalidArgument("fitFgam size mismatch");
  if (n <= q + 49 + 1)
    throw InsufficientData("fitFgam: need n > q + 50");

  const BsplineBasis timeBasis = makeBsplineBasis(3, 3, 0.0, 1.0);
  const double xmin = sample.values.minCoeff();
  const double xmax = sample.values.maxCoeff();
  // Expand slightly so training values never sit on the clamped boundary.
  const BsplineBasis valueBasis =
      makeBsplineBasis(3, 3, xmin - 1e-9, xmax + 1e-9);

  const Eigen::MatrixXd features = fgamFeatures(sample, timeBasis, valueBasis);
  Eigen::MatrixXd design(n, 1 + q + features.cols());
  design.col(0).setOnes();
  if (q > 0) design.middleCols(1, q) = W;
  design.rightCols(features.cols()) = features;

  // The tensor features sum to 1 per subject (partition of unity), so the
  // design is exactly collinear with the intercept; the ridge resolves it.
  LogisticFit fit = fitLogisticMle(design, T, 1e-6);
  PropensityFit out;
  out.method = Method::Fgam;
  out.propensities = clipPropensities(fit.fitted);
  out.converged = fit.converged;
  out.selectedL = 0;
  return out;
}

}  // namespace funcate
