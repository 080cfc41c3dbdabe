#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "wbp/aibp.hpp"
#include "wbp/constraint.hpp"
#include "wbp/ibp.hpp"
#include "wbp/lp_oracle.hpp"
#include "wbp/rounding.hpp"
#include "wbp/tu.hpp"

using namespace wbp;

namespace {

BarycenterProblem random_problem(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix support(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < support.size(); ++i) support(i) = u(rng);
  Matrix cost = build_cost_matrix(support, 2.0, Metric::euclidean);
  support /= std::sqrt(cost.maxCoeff());
  cost = build_cost_matrix(support, 2.0, Metric::euclidean);
  Matrix w(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = 0.05 + u(rng);
  for (Eigen::Index k = 0; k < w.rows(); ++k) w.row(k) /= w.row(k).sum();
  const Vector omega = Vector::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m));
  return BarycenterProblem(support, w, omega, std::vector<Matrix>(m, cost), 2.0, Metric::euclidean);
}

void BM_PhiGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = random_problem(15, n, 1);
  const DualObjective obj(p, 0.01);
  const DualState s = DualState::zeros(15, n);
  for (auto _ : state) benchmark::DoNotOptimize(obj.gradient(s));
}
BENCHMARK(BM_PhiGradient)->Arg(10)->Arg(50)->Arg(200);

void BM_IbpIteration(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = random_problem(15, n, 2);
  const DualObjective obj(p, 0.01);
  DualState s = DualState::zeros(15, n);
  for (auto _ : state) {
    ibp_col_update(obj, s);
    ibp_row_update(obj, s);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_IbpIteration)->Arg(10)->Arg(50)->Arg(200);

void BM_AibpIteration(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = random_problem(15, n, 3);
  const DualObjective obj(p, 0.01);
  AibpState s = AibpState::initial(15, n, 7);
  DualState iterate;
  Matrix rows;
  for (auto _ : state) {
    aibp_step(s, obj, iterate, rows);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_AibpIteration)->Arg(10)->Arg(50)->Arg(200);

void BM_SolveTable1Instance(benchmark::State& state) {
  const auto p = random_problem(15, 10, 4);
  const double eta = 0.05;
  for (auto _ : state) {
    if (state.range(0) == 0)
      benchmark::DoNotOptimize(ibp_solve(p, eta, 1e-3));
    else
      benchmark::DoNotOptimize(aibp_solve(p, eta, 1e-3, 11));
  }
}
BENCHMARK(BM_SolveTable1Instance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RoundPlans(benchmark::State& state) {
  const auto p = random_problem(15, 50, 5);
  const DualObjective obj(p, 0.05);
  DualState s = DualState::zeros(15, 50);
  for (int i = 0; i < 5; ++i) {
    ibp_col_update(obj, s);
    ibp_row_update(obj, s);
  }
  ibp_col_update(obj, s);
  const auto B = materialize_B(obj, s);
  for (auto _ : state) benchmark::DoNotOptimize(round_plans(B, p.weights(), p.omega()));
}
BENCHMARK(BM_RoundPlans);

void BM_ExactLp(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto p = random_problem(m, n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp_exact(p));
}
BENCHMARK(BM_ExactLp)->Args({3, 5})->Args({5, 8})->Args({3, 12})->Unit(benchmark::kMillisecond);

void BM_TuBruteForceReduced(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const ReducedMatrix r = reduce_rows_n2(barycenter_constraint_matrix(m, 2), m);
  for (auto _ : state) benchmark::DoNotOptimize(is_tu_bruteforce(r.matrix));
}
BENCHMARK(BM_TuBruteForceReduced)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_GhouilaHouriReduced(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const ReducedMatrix r = reduce_rows_n2(barycenter_constraint_matrix(m, 2), m);
  for (auto _ : state) benchmark::DoNotOptimize(is_tu_ghc_full(r.matrix));
}
BENCHMARK(BM_GhouilaHouriReduced)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
