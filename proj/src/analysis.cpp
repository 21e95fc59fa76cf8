#include "funcate/analysis.hpp"

#include <ostream>

#include "funcate/csv.hpp"
#include "funcate/errors.hpp"

namespace funcate {

namespace {

void checkData(const AnalysisData& data) {
  const Eigen::Index n = data.Y.size();
  if (data.T.size() != n || data.X.n() != n ||
      (data.W.cols() > 0 && data.W.rows() != n))
    throw InvalidArgument("analysis data size mismatch");
}

SubstituteCovariate makeSubstituteFor(const AnalysisData& data,
                                      const Selection& selection) {
  if (selection.rule == Selection::Rule::Fve)
    return buildSubstitute(data.W, data.X, selection.fveThreshold);
  const int maxComp = static_cast<int>(
      std::min<Eigen::Index>(data.X.n() - 1, data.X.m()));
  FpcaModel model = fitFpca(data.X, maxComp);
  const int L = resolveSelection(selection, model, data.W, data.T);
  return substituteFromModel(data.W, model, L);
}

}  // namespace

WeightedAte estimateWithMethod(const AnalysisData& data,
                               const MethodSpec& spec) {
  checkData(data);
  switch (spec.method) {
    case Method::Gfplm: {
      PropensityFit fit = fitGfplm(data.W, data.X, data.T, spec.selection);
      if (!fit.converged) throw NotConverged("GFPLM fit did not converge");
      return {estimateHt(data.Y, data.T, *fit.propensities),
              estimateHajek(data.Y, data.T, *fit.propensities)};
    }
    case Method::Fgam: {
      PropensityFit fit = fitFgam(data.W, data.X, data.T);
      if (!fit.converged) throw NotConverged("FGAM fit did not converge");
      return {estimateHt(data.Y, data.T, *fit.propensities),
              estimateHajek(data.Y, data.T, *fit.propensities)};
    }
    case Method::Cbps1:
    case Method::Cbps2: {
      const SubstituteCovariate sub = makeSubstituteFor(data, spec.selection);
      const BalanceSpec bs{spec.method == Method::Cbps1 ? 1 : 2};
      PropensityFit fit = fitCbps(sub, data.T, bs);
      return {estimateHt(data.Y, data.T, *fit.propensities),
              estimateHajek(data.Y, data.T, *fit.propensities)};
    }
    case Method::Kbcb: {
      const SubstituteCovariate sub = makeSubstituteFor(data, spec.selection);
      KernelBalanceResult kb =
          fitKernelBalance(sub, data.T, spec.lambdaGrid);
      return estimateFromWeights(data.Y, data.T, kb.treatedWeights,
                                 kb.controlWeights);
    }
  }
  throw InvalidArgument("unknown method");
}

AteEstimate bootstrapEstimate(const AnalysisData& data, const MethodSpec& spec,
                              int B, std::uint64_t seed) {
  checkData(data);
  const int n = static_cast<int>(data.n());
  const WeightedAte point = estimateWithMethod(data, spec);

  const auto refit =
      [&](const std::vector<int>& indices) -> std::optional<WeightedAte> {
    AnalysisData resampled;
    resampled.W.resize(n, data.W.cols());
    Eigen::MatrixXd values(n, data.X.m());
    resampled.T.resize(n);
    resampled.Y.resize(n);
    for (int i = 0; i < n; ++i) {
      if (data.W.cols() > 0) resampled.W.row(i) = data.W.row(indices[i]);
      values.row(i) = data.X.values.row(indices[i]);
      resampled.T(i) = data.T(indices[i]);
      resampled.Y(i) = data.Y(indices[i]);
    }
    resampled.X = GridFunctionSample{data.X.grid, std::move(values)};
    try {
      return estimateWithMethod(resampled, spec);
    } catch (const EstimationError&) {
      return std::nullopt;
    } catch (const InvalidArgument&) {
      return std::nullopt;  // e.g. a resample with an empty arm
    }
  };
  return bootstrapImpl(n, point, B, seed, refit);
}

std::vector<MethodReport> runAnalysis(const AnalysisRequest& request) {
  const ScalarTable table = readScalarCsv(request.covariatesPath);
  GridFunctionSample sample = readFunctionalCsv(request.functionalPath);

  const int n = static_cast<int>(table.values.rows());
  if (sample.n() != n)
    throw InvalidArgument("covariate and functional CSVs disagree on n (" +
                          std::to_string(n) + " vs " +
                          std::to_string(sample.n()) + ")");
  const int tCol = table.columnIndex(request.treatmentColumn);
  if (tCol < 0)
    throw InvalidArgument("treatment column not found: " +
                          request.treatmentColumn);
  const int yCol = table.columnIndex(request.outcomeColumn);
  if (yCol < 0)
    throw InvalidArgument("outcome column not found: " +
                          request.outcomeColumn);

  AnalysisData data;
  data.T.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = table.values(i, tCol);
    if (t != 0.0 && t != 1.0)
      throw InvalidArgument("treatment column must be binary 0/1 (row " +
                            std::to_string(i + 2) + ")");
    data.T(i) = static_cast<int>(t);
  }
  data.Y = table.values.col(yCol);

  const int q = static_cast<int>(table.columns.size()) - 2;
  data.W.resize(n, std::max(q, 0));
  int w = 0;
  for (int c = 0; c < static_cast<int>(table.columns.size()); ++c) {
    if (c == tCol || c == yCol) continue;
    data.W.col(w++) = table.values.col(c);
  }
  // Scalar covariates are mean-centered before any fit.
  for (int c = 0; c < data.W.cols(); ++c)
    data.W.col(c).array() -= data.W.col(c).mean();
  data.X = std::move(sample);

  std::vector<MethodReport> reports;
  reports.reserve(request.methods.size());
  for (Method method : request.methods) {
    MethodSpec spec;
    spec.method = method;
    spec.selection = request.selection;
    MethodReport report;
    report.method = method;
    if (request.bootstrapB > 0) {
      report.estimate =
          bootstrapEstimate(data, spec, request.bootstrapB, request.seed);
    } else {
      const WeightedAte point = estimateWithMethod(data, spec);
      report.estimate.ht = point.ht;
      report.estimate.hajek = point.hajek;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

void writeAnalysisCsv(const std::vector<MethodReport>& reports,
                      std::ostream& out) {
  out << "method,estimator,estimate,se,ci_lo,ci_hi\n";
  for (const MethodReport& r : reports) {
    for (int e = 0; e < 2; ++e) {
      const bool ht = e == 0;
      out << methodName(r.method) << ',' << (ht ? "HT" : "Hajek") << ','
          << formatDouble(ht ? r.estimate.ht : r.estimate.hajek) << ',';
      if (r.estimate.se.has_value()) {
        out << formatDouble(ht ? r.estimate.se->first
                               : r.estimate.se->second);
      }
      out << ',';
      if (r.estimate.ci95.has_value()) {
        const auto& ci =
            ht ? r.estimate.ci95->first : r.estimate.ci95->second;
        out << formatDouble(ci[0]) << ',' << formatDouble(ci[1]);
      } else {
        out << ',';
      }
      out << '\n';
    }
  }
}

}  // namespace funcate
