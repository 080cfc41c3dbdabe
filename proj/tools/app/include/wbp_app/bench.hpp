#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wbp/core.hpp"
#include "wbp/solver.hpp"
#include "wbp_app/report.hpp"

namespace wbp::app {

struct BenchOptions {
  std::vector<double> etas = {1e-1, 5e-2, 1e-2, 5e-3};
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  double eps_prime = 1e-3;
  SolverOptions solver;
  /// 0 means "use WBP_THREADS, else the hardware concurrency".
  std::size_t threads = 0;
  /// Write trial-0 traces (`<alg>_eta<eta>.csv`) here when set.
  std::optional<std::filesystem::path> csv_dir;
};

struct TrialOutcome {
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double wall_time_ms = 0.0;
  /// Cost of the final iterate rounded onto the instance's weights.
  double primal_value = 0.0;
  std::size_t estimate_restarts = 0;
  bool converged = true;
};

struct BenchRow {
  double eta = 0.0;
  std::string algorithm;
  std::vector<TrialOutcome> trials;

  double iteration_mean() const;
  double iteration_std() const;
  double time_mean() const;
  double time_std() const;
  double primal_mean() const;
  std::size_t failures() const;
};

struct BenchResult {
  std::vector<BenchRow> rows;  ///< for every eta: ibp, then aibp
  GapReference gap_reference = GapReference::lp;
  /// LP optimum (same for every eta) or the long-IBP dual value at that eta.
  std::vector<double> reference_values;  ///< one per eta
  std::string instance_hash;
};

/// Seed of trial i: splitmix64(master + i).
std::uint64_t trial_seed(std::uint64_t master, std::size_t i);

/// Parallel trial count: WBP_THREADS when it parses as a positive integer, else the hardware.
std::size_t bench_threads(std::size_t requested);

/// LP when m n^2 <= kLpMaxVariables, else the dual value.
GapReference choose_gap_reference(const BarycenterProblem& problem);

/// Dual value of a long IBP run: 10^6 iterations or residue 1e-13, whichever comes first.
double reference_dual_value(const BarycenterProblem& problem, double eta,
                            std::size_t max_iterations = 1'000'000);

BenchResult run_bench(const BarycenterProblem& problem, const BenchOptions& options);

/// Table of iteration and time mean +- std per (eta, algorithm).
std::string format_bench_table(const BenchResult& result);

Json bench_to_json(const BenchResult& result);

}  // namespace wbp::app
