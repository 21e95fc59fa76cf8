#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "funcate/csv.hpp"
#include "funcate/errors.hpp"
#include "funcate/rng.hpp"

using namespace funcate;

namespace {

std::filesystem::path tempFile(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "funcate_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("functional CSV round-trips exactly") {
  const Grid grid = trapezoidGrid(23);
  RngStream rng(8, 0);
  Eigen::MatrixXd values(9, 23);
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      values(i, j) = 1e3 * rng.nextNormal() / 7.0;
  const GridFunctionSample sample = makeSample(grid, values);

  const auto path = tempFile("roundtrip.csv");
  writeFunctionalCsv(sample, path.string());
  const GridFunctionSample loaded = readFunctionalCsv(path.string());

  REQUIRE(loaded.n() == sample.n());
  REQUIRE(loaded.m() == sample.m());
  CHECK((loaded.grid.points - sample.grid.points).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((loaded.values - sample.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scalar CSV round-trips exactly") {
  ScalarTable table;
  table.columns = {"w1", "w2", "T", "Y"};
  RngStream rng(9, 0);
  table.values.resize(6, 4);
  for (Eigen::Index i = 0; i < 6; ++i) {
    table.values(i, 0) = rng.nextNormal();
    table.values(i, 1) = rng.nextNormal() * 1e-8;
    table.values(i, 2) = static_cast<double>(rng.nextBernoulli(0.5));
    table.values(i, 3) = 200.0 + rng.nextNormal();
  }
  const auto path = tempFile("scalar.csv");
  writeScalarCsv(table, path.string());
  const ScalarTable loaded = readScalarCsv(path.string());
  REQUIRE(loaded.columns == table.columns);
  CHECK((loaded.values - table.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.columnIndex("T") == 2);
  CHECK(loaded.columnIndex("missing") == -1);
}

TEST_CASE("malformed CSV input is diagnosed") {
  const auto path = tempFile("bad.csv");
  {
    std::ofstream out(path);
    out << "0,0.5,1\n1,2,zebra\n";
  }
  CHECK_THROWS_AS(readFunctionalCsv(path.string()), InvalidArgument);

  {
    std::ofstream out(path);
    out << "0,0.5,1\n1,2\n";  // short row
  }
  CHECK_THROWS_AS(readFunctionalCsv(path.string()), InvalidArgument);

  {
    std::ofstream out(path);
    out << "0,0.5,0.9\n1,2,3\n";  // grid does not end at 1
  }
  CHECK_THROWS_AS(readFunctionalCsv(path.string()), InvalidArgument);

  CHECK_THROWS_AS(readFunctionalCsv("/nonexistent/file.csv"),
                  InvalidArgument);
}

TEST_CASE("formatDouble keeps 17 significant digits") {
  CHECK(formatDouble(0.1) == "0.10000000000000001");
  CHECK(formatDouble(1.0) == "1");
  const double pi = 3.14159265358979312;
  CHECK(std::stod(formatDouble(pi)) == pi);
}
