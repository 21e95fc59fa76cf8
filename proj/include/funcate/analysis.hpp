#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "funcate/ate.hpp"
#include "funcate/balance.hpp"
#include "funcate/grid.hpp"
#include "funcate/propensity.hpp"

namespace funcate {

// One dataset ready for estimation.
struct AnalysisData {
  Eigen::MatrixXd W;  // n x q scalar covariates (may have zero columns)
  GridFunctionSample X;
  Eigen::VectorXi T;
  Eigen::VectorXd Y;

  Eigen::Index n() const { return Y.size(); }
};

struct MethodSpec {
  Method method = Method::Gfplm;
  Selection selection = Selection::fve(0.95);
  std::vector<double> lambdaGrid = defaultLambdaGrid();
};

// Fits the requested propensity method on the data and returns the HT and
// Hajek estimates. Throws EstimationError subtypes on fit failures (IRLS
// cap, separation, balance not attained, ...).
WeightedAte estimateWithMethod(const AnalysisData& data,
                               const MethodSpec& spec);

// Percentile bootstrap of the full pipeline: every resample redoes FPCA,
// truncation selection and the propensity fit.
AteEstimate bootstrapEstimate(const AnalysisData& data, const MethodSpec& spec,
                              int B, std::uint64_t seed);

// CSV-based analysis request (the `analyze` CLI surface).
struct AnalysisRequest {
  std::string covariatesPath;
  std::string functionalPath;
  std::string treatmentColumn;
  std::string outcomeColumn;
  std::vector<Method> methods;
  Selection selection = Selection::fve(0.95);
  int bootstrapB = 0;  // 0 disables the bootstrap
  std::uint64_t seed = 0;
};

struct MethodReport {
  Method method = Method::Gfplm;
  AteEstimate estimate;
};

// Loads the two CSV files, validates them (binary treatment, consistent n),
// mean-centers the scalar covariates, resolves the truncation level once,
// and runs every requested method.
std::vector<MethodReport> runAnalysis(const AnalysisRequest& request);

// estimates.csv: method,estimator,estimate,se,ci_lo,ci_hi (17 significant
// digits; se/ci blank when the bootstrap is disabled).
void writeAnalysisCsv(const std::vector<MethodReport>& reports,
                      std::ostream& out);

}  // namespace funcate
