#include "funcate/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "funcate/basis.hpp"
#include "funcate/csv.hpp"
#include "funcate/errors.hpp"
#include "funcate/logistic.hpp"
#include "funcate/parallel.hpp"

namespace funcate {

namespace {

// PSM 1/2 scalar-covariate coefficients.
const Eigen::Vector3d kAlpha(-1.0, 0.5, -0.1);

Eigen::MatrixXd fourierOnGrid(const Grid& grid, int count) {
  Eigen::MatrixXd phi(grid.size(), count);
  for (Eigen::Index g = 0; g < grid.size(); ++g)
    for (int k = 1; k <= count; ++k)
      phi(g, k - 1) = fourierBasis(k, grid.points(g));
  return phi;
}

// beta_0 = 2 phi_1 + 0.5 phi_2 + 0.5 phi_3 + phi_4 evaluated on the grid.
Eigen::VectorXd psm1BetaOnGrid(const Grid& grid) {
  Eigen::VectorXd beta(grid.size());
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double t = grid.points(g);
    beta(g) = 2.0 * fourierBasis(1, t) + 0.5 * fourierBasis(2, t) +
              0.5 * fourierBasis(3, t) + fourierBasis(4, t);
  }
  return beta;
}

double psm2Surface(double t, double x) {
  const double a = (t - 0.5) / 0.3;
  const double b = x / 5.0;
  return -0.5 + std::exp(-a * a - b * b);
}

}  // namespace

Subjects subjectsFromZ(const Eigen::MatrixXd& Z, const Grid& grid) {
  if (Z.cols() != 6) throw InvalidArgument("Z must have 6 columns");
  const Eigen::Index n = Z.rows();
  Subjects out;
  out.Z = Z;
  out.W.resize(n, 3);
  out.W.col(0) = Z.col(0) + 2.0 * Z.col(1);
  out.W.col(1) = Z.col(1).array().square() - Z.col(2).array().square();
  out.W.col(2) = Z.col(2).array().exp() - std::exp(0.5);

  Eigen::MatrixXd scores(n, 6);
  for (int k = 1; k <= 6; ++k) scores.col(k - 1) = 2.0 * Z.col(k - 1) / k;
  const Eigen::MatrixXd phi = fourierOnGrid(grid, 6);
  out.X = GridFunctionSample{grid, scores * phi.transpose()};
  return out;
}

Subjects generateSubjects(int n, RngStream& rng, const Grid& grid) {
  Eigen::MatrixXd Z(n, 6);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 6; ++k) Z(i, k) = rng.nextNormal();
  return subjectsFromZ(Z, grid);
}

double truePropensity(int psm, const Eigen::VectorXd& z,
                      const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                      const Grid& grid) {
  double eta = 0.0;
  switch (psm) {
    case 1: {
      const Eigen::VectorXd beta = psm1BetaOnGrid(grid);
      eta = kAlpha.dot(w) + innerProduct(beta, x, grid);
      break;
    }
    case 2: {
      double integral = 0.0;
      for (Eigen::Index g = 0; g < grid.size(); ++g)
        integral += grid.weights(g) * psm2Surface(grid.points(g), x(g));
      eta = kAlpha.dot(w) + integral;
      break;
    }
    case 3:
      eta = -z(0) + 0.5 * z(1) - 0.25 * z(2) - 0.1 * z(3);
      break;
    default:
      throw InvalidArgument("psm must be 1, 2 or 3");
  }
  return sigmoid(eta);
}

Eigen::VectorXd truePropensityVector(int psm, const Subjects& subjects,
                                     const Grid& grid) {
  const Eigen::Index n = subjects.Z.rows();
  Eigen::VectorXd eta(n);
  switch (psm) {
    case 1: {
      const Eigen::VectorXd weightedBeta =
          grid.weights.cwiseProduct(psm1BetaOnGrid(grid));
      eta = subjects.W * kAlpha + subjects.X.values * weightedBeta;
      break;
    }
    case 2: {
      for (Eigen::Index i = 0; i < n; ++i) {
        double integral = 0.0;
        for (Eigen::Index g = 0; g < grid.size(); ++g)
          integral += grid.weights(g) *
                      psm2Surface(grid.points(g), subjects.X.values(i, g));
        eta(i) = kAlpha.dot(subjects.W.row(i)) + integral;
      }
      break;
    }
    case 3:
      eta = -subjects.Z.col(0) + 0.5 * subjects.Z.col(1) -
            0.25 * subjects.Z.col(2) - 0.1 * subjects.Z.col(3);
      break;
    default:
      throw InvalidArgument("psm must be 1, 2 or 3");
  }
  return eta.unaryExpr([](double e) { return sigmoid(e); });
}

double outcomeMean(int om, int treatment, const Eigen::VectorXd& z) {
  switch (om) {
    case 1:
      return 200.0 + 10.0 * treatment +
             (1.5 * treatment - 0.5) *
                 (27.4 * z(0) + 13.7 * z(1) + 13.7 * z(2) + 13.7 * z(3));
    case 2:
      return z(0) * z(1) * z(1) * z(1) * z(2) * z(2) * z(3);
    default:
      throw InvalidArgument("om must be 1 or 2");
  }
}

double generateOutcome(int om, int treatment, const Eigen::VectorXd& z,
                       RngStream& rng) {
  return outcomeMean(om, treatment, z) + rng.nextNormal();
}

double trueTau(int om) {
  if (om == 1) return 10.0;
  if (om == 2) return 0.0;
  throw InvalidArgument("om must be 1 or 2");
}

std::pair<std::vector<double>, double> trimOutliers(
    const std::vector<double>& estimates, double k) {
  std::vector<double> finite;
  finite.reserve(estimates.size());
  for (double e : estimates)
    if (std::isfinite(e)) finite.push_back(e);
  if (finite.empty()) throw NoValidRuns("no finite estimates to trim");
  if (finite.size() < 2)
    throw InsufficientData("trimOutliers needs at least 2 finite estimates");

  double mean = 0.0;
  for (double e : finite) mean += e;
  mean /= static_cast<double>(finite.size());
  double ss = 0.0;
  for (double e : finite) ss += (e - mean) * (e - mean);
  const double sd = std::sqrt(ss / (finite.size() - 1.0));

  std::vector<double> kept;
  kept.reserve(finite.size());
  for (double e : finite)
    if (std::abs(e - mean) <= k * sd) kept.push_back(e);
  const double proportion =
      static_cast<double>(kept.size()) / static_cast<double>(finite.size());
  return {std::move(kept), proportion};
}

std::pair<double, double> summarizeEstimates(const std::vector<double>& kept,
                                             double trueTau) {
  if (kept.empty()) throw NoValidRuns("no estimates to summarize");
  double mean = 0.0;
  double meanSq = 0.0;
  for (double e : kept) {
    mean += e;
    meanSq += (e - trueTau) * (e - trueTau);
  }
  mean /= static_cast<double>(kept.size());
  meanSq /= static_cast<double>(kept.size());
  return {mean - trueTau, std::sqrt(meanSq)};
}

SimSummary runCell(const SimDesign& design) {
  if (design.psm < 1 || design.psm > 3)
    throw InvalidArgument("psm must be 1, 2 or 3");
  if (design.om < 1 || design.om > 2)
    throw InvalidArgument("om must be 1 or 2");
  if (design.n < 50) throw InvalidArgument("n must be >= 50");
  if (design.runs < 1) throw InvalidArgument("runs must be >= 1");
  if (design.methods.empty())
    throw InvalidArgument("at least one method is required");
  const Grid grid = trapezoidGrid(design.gridPoints);

  const int runs = design.runs;
  const int methodCount = static_cast<int>(design.methods.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd htVals =
      Eigen::MatrixXd::Constant(runs, methodCount, nan);
  Eigen::MatrixXd hajekVals =
      Eigen::MatrixXd::Constant(runs, methodCount, nan);

  parallelFor(runs, [&](int r) {
    RngStream rng(design.seed, static_cast<std::uint64_t>(r));
    const Subjects subj = generateSubjects(design.n, rng, grid);

    AnalysisData data;
    data.W = subj.W;
    data.X = subj.X;
    const Eigen::VectorXd propensities =
        truePropensityVector(design.psm, subj, grid);
    data.T.resize(design.n);
    for (int i = 0; i < design.n; ++i)
      data.T(i) = rng.nextBernoulli(propensities(i));
    data.Y.resize(design.n);
    for (int i = 0; i < design.n; ++i)
      data.Y(i) = generateOutcome(design.om, data.T(i),
                                  subj.Z.row(i).transpose(), rng);

    for (int mi = 0; mi < methodCount; ++mi) {
      MethodSpec spec;
      spec.method = design.methods[mi];
      spec.selection = Selection::fve(0.95);
      try {
        const WeightedAte est = estimateWithMethod(data, spec);
        htVals(r, mi) = est.ht;
        hajekVals(r, mi) = est.hajek;
      } catch (const EstimationError&) {
        // failed run for this method; stays NaN
      } catch (const InvalidArgument&) {
      }
    }
  });

  SimSummary summary;
  summary.design = design;
  summary.trueTau = trueTau(design.om);
  summary.cells.resize(methodCount);
  for (int mi = 0; mi < methodCount; ++mi) {
    for (int e = 0; e < 2; ++e) {
      const Eigen::MatrixXd& vals = e == 0 ? htVals : hajekVals;
      std::vector<double> estimates;
      estimates.reserve(runs);
      for (int r = 0; r < runs; ++r)
        if (std::isfinite(vals(r, mi))) estimates.push_back(vals(r, mi));
      try {
        auto [kept, unused] = trimOutliers(estimates);
        auto [bias, rmse] = summarizeEstimates(kept, summary.trueTau);
        const double retained =
            static_cast<double>(kept.size()) / static_cast<double>(runs);
        summary.cells[mi][e] = CellStats{bias, rmse, retained};
      } catch (const EstimationError&) {
        summary.cells[mi][e] = std::nullopt;
      }
    }
  }
  return summary;
}

void writeSummaryCsv(const SimSummary& summary, std::ostream& out) {
  out << "psm,om,n,method,estimator,bias,rmse,retained\n";
  for (std::size_t mi = 0; mi < summary.design.methods.size(); ++mi) {
    for (int e = 0; e < 2; ++e) {
      out << summary.design.psm << ',' << summary.design.om << ','
          << summary.design.n << ','
          << methodName(summary.design.methods[mi]) << ','
          << (e == 0 ? "HT" : "Hajek") << ',';
      const auto& cell = summary.cells[mi][e];
      if (cell.has_value()) {
        out << formatDouble(cell->bias) << ',' << formatDouble(cell->rmse)
            << ',' << formatDouble(cell->retainedProportion);
      } else {
        out << ",,0";
      }
      out << '\n';
    }
  }
}

void writeSummaryMarkdown(const SimSummary& summary, std::ostream& out) {
  const auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  out << "PSM " << summary.design.psm << ", OM " << summary.design.om
      << ", n = " << summary.design.n << ", runs = " << summary.design.runs
      << ", true effect = " << fmt(summary.trueTau) << "\n\n";
  out << "| Method | HT Bias | HT RMSE | Hajek Bias | Hajek RMSE |\n";
  out << "|---|---|---|---|---|\n";
  for (std::size_t mi = 0; mi < summary.design.methods.size(); ++mi) {
    std::string label = methodName(summary.design.methods[mi]);
    const auto& ht = summary.cells[mi][0];
    const auto& hajek = summary.cells[mi][1];
    // Retained percentages shown next to the method when below 100%.
    const auto pct = [&](const std::optional<CellStats>& c) {
      if (!c.has_value()) return std::string("0%");
      if (c->retainedProportion >= 1.0) return std::string("-");
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.1f%%",
                    100.0 * c->retainedProportion);
      return std::string(buf);
    };
    if (!ht.has_value() || !hajek.has_value() ||
        ht->retainedProportion < 1.0 || hajek->retainedProportion < 1.0)
      label += " (" + pct(ht) + ", " + pct(hajek) + ")";
    out << "| " << label << " | ";
    if (ht.has_value())
      out << fmt(ht->bias) << " | " << fmt(ht->rmse) << " | ";
    else
      out << "- | - | ";
    if (hajek.has_value())
      out << fmt(hajek->bias) << " | " << fmt(hajek->rmse) << " |\n";
    else
      out << "- | - |\n";
  }
}

}  // namespace funcate
