// Throughput comparison of the serial reference kernels against their
// OpenMP counterparts, plus an end-to-end simulation cell at both thread
// settings. Run with FUNCATE_THREADS unset to use all hardware threads.

#include <cstdlib>

#include <benchmark/benchmark.h>

#include "funcate/balance.hpp"
#include "funcate/kernels.hpp"
#include "funcate/rng.hpp"
#include "funcate/simulation.hpp"

using namespace funcate;

namespace {

Eigen::MatrixXd unitRows(int n, int d) {
  RngStream rng(1, 0);
  Eigen::MatrixXd u(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) u(i, c) = rng.nextUniform();
  return u;
}

void setThreads(const char* value) { setenv("FUNCATE_THREADS", value, 1); }

void BM_SobolevGramSerial(benchmark::State& state) {
  const Eigen::MatrixXd u = unitRows(static_cast<int>(state.range(0)), 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::sobolevGramSerial(u));
}
BENCHMARK(BM_SobolevGramSerial)->Arg(200)->Arg(500);

void BM_SobolevGramParallel(benchmark::State& state) {
  setThreads("0");
  const Eigen::MatrixXd u = unitRows(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sobolevGram(u));
}
BENCHMARK(BM_SobolevGramParallel)->Arg(200)->Arg(500);

void BM_SymMatvecSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd gram = kernels::sobolevGramSerial(unitRows(n, 7));
  RngStream rng(2, 0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.nextNormal();
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::symMatvecSerial(gram, x));
}
BENCHMARK(BM_SymMatvecSerial)->Arg(500)->Arg(2000);

void BM_SymMatvecParallel(benchmark::State& state) {
  setThreads("0");
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd gram = kernels::sobolevGramSerial(unitRows(n, 7));
  RngStream rng(2, 0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.nextNormal();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::symMatvec(gram, x));
}
BENCHMARK(BM_SymMatvecParallel)->Arg(500)->Arg(2000);

void BM_KernelBalance(benchmark::State& state) {
  setThreads("1");
  RngStream rng(3, 0);
  const int n = 300;
  Eigen::MatrixXd C(n, 7);
  Eigen::VectorXi T(n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 7; ++c) C(i, c) = rng.nextNormal();
    T(i) = rng.nextBernoulli(0.5);
  }
  const SubstituteCovariate sub = makeSubstitute(C, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(fitKernelBalance(sub, T, {1e-4}));
}
BENCHMARK(BM_KernelBalance);

void BM_RunCell(benchmark::State& state) {
  setThreads(state.range(0) == 1 ? "1" : "0");
  SimDesign design;
  design.psm = 1;
  design.om = 1;
  design.n = 200;
  design.runs = 8;
  design.seed = 17;
  design.methods = {Method::Gfplm, Method::Cbps1};
  for (auto _ : state) benchmark::DoNotOptimize(runCell(design));
}
BENCHMARK(BM_RunCell)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
