#include "funcate/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "funcate/errors.hpp"

namespace funcate {

std::string formatDouble(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::vector<std::string> splitLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parseNumber(const std::string& field, int row, int col) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw InvalidArgument("malformed CSV number at row " +
                          std::to_string(row) + ", column " +
                          std::to_string(col) + ": '" + field + "'");
  }
  return value;
}

std::vector<std::string> readLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open CSV file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

GridFunctionSample readFunctionalCsv(const std::string& path) {
  const std::vector<std::string> lines = readLines(path);
  if (lines.size() < 2)
    throw InvalidArgument("functional CSV needs a header and data rows: " +
                          path);

  const std::vector<std::string> header = splitLine(lines[0]);
  const int m = static_cast<int>(header.size());
  Eigen::VectorXd points(m);
  for (int j = 0; j < m; ++j) points(j) = parseNumber(header[j], 1, j + 1);
  Grid grid = gridFromPoints(points);

  const int n = static_cast<int>(lines.size()) - 1;
  Eigen::MatrixXd values(n, m);
  for (int i = 0; i < n; ++i) {
    const std::vector<std::string> fields = splitLine(lines[i + 1]);
    if (static_cast<int>(fields.size()) != m)
      throw InvalidArgument("functional CSV row " + std::to_string(i + 2) +
                            " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(m));
    for (int j = 0; j < m; ++j)
      values(i, j) = parseNumber(fields[j], i + 2, j + 1);
  }
  return makeSample(std::move(grid), std::move(values));
}

void writeFunctionalCsv(const GridFunctionSample& sample,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write CSV file: " + path);
  for (Eigen::Index j = 0; j < sample.m(); ++j) {
    if (j > 0) out << ',';
    out << formatDouble(sample.grid.points(j));
  }
  out << '\n';
  for (Eigen::Index i = 0; i < sample.n(); ++i) {
    for (Eigen::Index j = 0; j < sample.m(); ++j) {
      if (j > 0) out << ',';
      out << formatDouble(sample.values(i, j));
    }
    out << '\n';
  }
}

int ScalarTable::columnIndex(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return static_cast<int>(c);
  return -1;
}

ScalarTable readScalarCsv(const std::string& path) {
  const std::vector<std::string> lines = readLines(path);
  if (lines.empty()) throw InvalidArgument("empty CSV file: " + path);

  ScalarTable table;
  table.columns = splitLine(lines[0]);
  const int q = static_cast<int>(table.columns.size());
  const int n = static_cast<int>(lines.size()) - 1;
  table.values.resize(n, q);
  for (int i = 0; i < n; ++i) {
    const std::vector<std::string> fields = splitLine(lines[i + 1]);
    if (static_cast<int>(fields.size()) != q)
      throw InvalidArgument("CSV row " + std::to_string(i + 2) + " has " +
                            std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(q));
    for (int j = 0; j < q; ++j)
      table.values(i, j) = parseNumber(fields[j], i + 2, j + 1);
  }
  return table;
}

void writeScalarCsv(const ScalarTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write CSV file: " + path);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      if (j > 0) out << ',';
      out << formatDouble(table.values(i, j));
    }
    out << '\n';
  }
}

}  // namespace funcate
