#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "funcate/grid.hpp"

namespace funcate {

// Shortest form rendering a double losslessly (17 significant digits).
std::string formatDouble(double value);

// Functional-covariate CSV: the header row holds the grid points, each
// following row is one subject's trajectory. Quadrature weights come from
// the local spacings.
GridFunctionSample readFunctionalCsv(const std::string& path);
void writeFunctionalCsv(const GridFunctionSample& sample,
                        const std::string& path);

// Scalar table: header row of column names, one subject per row.
struct ScalarTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;

  // Index of a named column, or -1.
  int columnIndex(const std::string& name) const;
};

ScalarTable readScalarCsv(const std::string& path);
void writeScalarCsv(const ScalarTable& table, const std::string& path);

}  // namespace funcate
