#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "funcate/analysis.hpp"
#include "funcate/grid.hpp"
#include "funcate/propensity.hpp"
#include "funcate/rng.hpp"

namespace funcate {

// One simulation cell: propensity model, outcome model, sample size, run
// count, master seed, and the estimation methods to compare.
struct SimDesign {
  int psm = 1;  // 1, 2 or 3
  int om = 1;   // 1 or 2
  int n = 200;
  int runs = 1000;
  std::uint64_t seed = 0;
  std::vector<Method> methods;
  int gridPoints = 101;
};

enum class Estimator { Ht = 0, Hajek = 1 };

struct CellStats {
  double bias = 0.0;
  double rmse = 0.0;
  double retainedProportion = 0.0;  // kept runs / total runs
};

struct SimSummary {
  SimDesign design;
  double trueTau = 0.0;
  // cells[methodIndex][estimatorIndex]; empty when no run produced a
  // usable estimate.
  std::vector<std::array<std::optional<CellStats>, 2>> cells;
};

struct Subjects {
  Eigen::MatrixXd Z;  // n x 6 latent normals
  Eigen::MatrixXd W;  // n x 3 scalar covariates
  GridFunctionSample X;
};

// Deterministic part of the covariate generator: W1 = Z1 + 2 Z2,
// W2 = Z2^2 - Z3^2, W3 = exp(Z3) - exp(1/2), and
// X(t) = sum_k (2 Z_k / k) phi_k(t) over the first six Fourier functions.
Subjects subjectsFromZ(const Eigen::MatrixXd& Z, const Grid& grid);

// Draws Z row by row (6 normals per subject) and applies subjectsFromZ.
Subjects generateSubjects(int n, RngStream& rng, const Grid& grid);

// True treatment probability for the given propensity model. Functional
// terms are integrated with the grid's quadrature weights.
double truePropensity(int psm, const Eigen::VectorXd& z,
                      const Eigen::VectorXd& w, const Eigen::VectorXd& x,
                      const Grid& grid);

// All subjects at once (hoists basis evaluation out of the subject loop);
// agrees with truePropensity up to rounding.
Eigen::VectorXd truePropensityVector(int psm, const Subjects& subjects,
                                     const Grid& grid);

// Outcome mean without noise; generateOutcome adds one standard normal.
double outcomeMean(int om, int treatment, const Eigen::VectorXd& z);
double generateOutcome(int om, int treatment, const Eigen::VectorXd& z,
                       RngStream& rng);

double trueTau(int om);

// Keeps finite estimates within k sample standard deviations of the mean
// (single pass, SD divisor count-1). Returns (kept, kept/finite count).
std::pair<std::vector<double>, double> trimOutliers(
    const std::vector<double>& estimates, double k = 10.0);

// (bias, rmse) of the kept estimates against the true effect.
std::pair<double, double> summarizeEstimates(const std::vector<double>& kept,
                                             double trueTau);

// Runs the whole cell: per run, generate subjects, assign treatment from
// the true propensity, generate the outcome, fit every requested method and
// record HT/Hajek. Failed fits are excluded and reflected in the retained
// proportion; per-(method, estimator) estimates are trimmed at 10 SD before
// aggregation. Runs execute in parallel on counter-based RNG streams, so
// the summary is identical for every thread count and seed-reproducible.
SimSummary runCell(const SimDesign& design);

void writeSummaryCsv(const SimSummary& summary, std::ostream& out);
void writeSummaryMarkdown(const SimSummary& summary, std::ostream& out);

}  // namespace funcate
