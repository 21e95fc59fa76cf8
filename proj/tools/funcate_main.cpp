#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "funcate/analysis.hpp"
#include "funcate/csv.hpp"
#include "funcate/errors.hpp"
#include "funcate/simulation.hpp"

namespace {

std::vector<funcate::Method> parseMethods(const std::string& arg) {
  std::vector<funcate::Method> methods;
  std::string token;
  std::istringstream in(arg);
  while (std::getline(in, token, ',')) {
    const auto method = funcate::methodFromName(token);
    if (!method.has_value())
      throw funcate::InvalidArgument("unknown method: " + token);
    methods.push_back(*method);
  }
  if (methods.empty())
    throw funcate::InvalidArgument("at least one method is required");
  return methods;
}

funcate::Selection parseSelection(const std::string& arg) {
  if (arg == "aic") return funcate::Selection::aic();
  if (arg.rfind("fve:", 0) == 0) {
    const double threshold = std::stod(arg.substr(4));
    if (!(threshold > 0.0 && threshold < 1.0))
      throw funcate::InvalidArgument("FVE threshold must be in (0, 1)");
    return funcate::Selection::fve(threshold);
  }
  if (arg.rfind("fixed:", 0) == 0) {
    const int L = std::stoi(arg.substr(6));
    if (L < 1) throw funcate::InvalidArgument("fixed L must be >= 1");
    return funcate::Selection::fixed(L);
  }
  throw funcate::InvalidArgument(
      "selection must be fve:<threshold>, aic, or fixed:<L>");
}

int runSimulate(const funcate::SimDesign& design, const std::string& outDir) {
  const funcate::SimSummary summary = funcate::runCell(design);

  bool anyCell = false;
  for (const auto& method : summary.cells)
    for (const auto& cell : method)
      if (cell.has_value()) anyCell = true;
  if (!anyCell) {
    std::cerr << "error: no valid runs in any cell\n";
    return 1;
  }

  std::filesystem::create_directories(outDir);
  {
    std::ofstream csv(outDir + "/summary.csv");
    funcate::writeSummaryCsv(summary, csv);
  }
  {
    std::ofstream md(outDir + "/summary.md");
    funcate::writeSummaryMarkdown(summary, md);
  }
  funcate::writeSummaryMarkdown(summary, std::cout);
  return 0;
}

int runAnalyze(const funcate::AnalysisRequest& request,
               const std::string& outDir) {
  const std::vector<funcate::MethodReport> reports =
      funcate::runAnalysis(request);

  std::filesystem::create_directories(outDir);
  {
    std::ofstream csv(outDir + "/estimates.csv");
    funcate::writeAnalysisCsv(reports, csv);
  }
  funcate::writeAnalysisCsv(reports, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "funcate: average treatment effect estimation with a functional "
      "covariate (set FUNCATE_THREADS to cap workers, 0 = auto)"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "Run one Monte Carlo cell and write summary.csv/.md");
  int psm = 1, om = 1, n = 200, runs = 1000, gridPoints = 101;
  std::uint64_t simSeed = 0;
  std::string simMethods = "GFPLM,FGAM,CBPS1,CBPS2,KBCB";
  std::string simOut;
  sim->add_option("--psm", psm, "Propensity score model (1-3)")
      ->required()
      ->check(CLI::Range(1, 3));
  sim->add_option("--om", om, "Outcome model (1-2)")
      ->required()
      ->check(CLI::Range(1, 2));
  sim->add_option("--n", n, "Subjects per run (>= 50)")->required();
  sim->add_option("--runs", runs, "Simulation runs")->required();
  sim->add_option("--seed", simSeed, "Master seed")->required();
  sim->add_option("--methods", simMethods,
                  "Comma-separated list: GFPLM,FGAM,CBPS1,CBPS2,KBCB");
  sim->add_option("--out", simOut, "Output directory")->required();
  sim->add_option("--grid-points", gridPoints, "Grid resolution")
      ->check(CLI::Range(3, 100000));

  // analyze
  auto* ana = app.add_subcommand(
      "analyze",
      "Estimate treatment effects from CSV data and write estimates.csv. "
      "Rows of the covariate and functional CSVs must describe the same "
      "subjects in the same order.");
  std::string covPath, funPath, tCol, yCol;
  std::string anaMethods = "GFPLM";
  std::string selectionArg = "fve:0.95";
  std::string anaOut;
  int bootstrapB = 0;
  std::uint64_t anaSeed = 0;
  ana->add_option("--covariates", covPath,
                  "Scalar CSV with named columns incl. treatment/outcome")
      ->required();
  ana->add_option("--functional", funPath,
                  "Functional CSV (header = grid points on [0,1])")
      ->required();
  ana->add_option("--treatment", tCol, "Treatment column name")->required();
  ana->add_option("--outcome", yCol, "Outcome column name")->required();
  ana->add_option("--methods", anaMethods, "Comma-separated method list");
  ana->add_option("--selection", selectionArg,
                  "FPC truncation: fve:<threshold>, aic, or fixed:<L>");
  ana->add_option("--bootstrap", bootstrapB,
                  "Bootstrap resamples (0 disables, else >= 100)");
  ana->add_option("--seed", anaSeed, "Bootstrap seed");
  ana->add_option("--out", anaOut, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      funcate::SimDesign design;
      design.psm = psm;
      design.om = om;
      design.n = n;
      design.runs = runs;
      design.seed = simSeed;
      design.methods = parseMethods(simMethods);
      design.gridPoints = gridPoints;
      return runSimulate(design, simOut);
    }
    funcate::AnalysisRequest request;
    request.covariatesPath = covPath;
    request.functionalPath = funPath;
    request.treatmentColumn = tCol;
    request.outcomeColumn = yCol;
    request.methods = parseMethods(anaMethods);
    request.selection = parseSelection(selectionArg);
    request.bootstrapB = bootstrapB;
    request.seed = anaSeed;
    return runAnalyze(request, anaOut);
  } catch (const funcate::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const funcate::EstimationError& e) {
    std::cerr << "estimation failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
