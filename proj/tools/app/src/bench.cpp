#include "wbp_app/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "wbp/aibp.hpp"
#include "wbp/ibp.hpp"
#include "wbp/lp_oracle.hpp"
#include "wbp/rounding.hpp"
#include "wbp_app/generator.hpp"

namespace wbp::app {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

template <class F>
std::vector<double> collect(const std::vector<TrialOutcome>& trials, F&& f) {
  std::vector<double> out;
  out.reserve(trials.size());
  for (const TrialOutcome& t : trials) out.push_back(f(t));
  return out;
}

std::string eta_label(double eta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eta);
  return buf;
}

struct TrialRun {
  TrialOutcome outcome;
  SolveReport report;
};

TrialRun run_trial(const BarycenterProblem& problem, bool accelerated, double eta, double eps_prime,
                   std::uint64_t seed, const SolverOptions& options) {
  TrialRun run;
  run.outcome.seed = seed;
  SolveResult result;
  try {
    result = accelerated ? aibp_solve(problem, eta, eps_prime, seed, options)
                         : ibp_solve(problem, eta, eps_prime, options);
  } catch (const NonConvergenceError& e) {
    result.report = e.report();
    result.dual = e.state();
    result.plans.plans = materialize_B(DualObjective(problem, eta), result.dual);
    run.outcome.converged = false;
  }
  const PlanStack rounded = round_plans(result.plans.plans, problem.weights(), problem.omega());
  run.outcome.iterations = result.report.iterations;
  run.outcome.wall_time_ms = result.report.wall_time_ms;
  run.outcome.primal_value = primal_objective(problem, rounded.plans);
  run.outcome.estimate_restarts = result.report.estimate_restarts;
  run.report = std::move(result.report);
  return run;
}

}  // namespace

double BenchRow::iteration_mean() const {
  return mean_of(collect(trials, [](const TrialOutcome& t) { return static_cast<double>(t.iterations); }));
}
double BenchRow::iteration_std() const {
  return std_of(collect(trials, [](const TrialOutcome& t) { return static_cast<double>(t.iterations); }));
}
double BenchRow::time_mean() const {
  return mean_of(collect(trials, [](const TrialOutcome& t) { return t.wall_time_ms; }));
}
double BenchRow::time_std() const {
  return std_of(collect(trials, [](const TrialOutcome& t) { return t.wall_time_ms; }));
}
double BenchRow::primal_mean() const {
  return mean_of(collect(trials, [](const TrialOutcome& t) { return t.primal_value; }));
}
std::size_t BenchRow::failures() const {
  return static_cast<std::size_t>(
      std::count_if(trials.begin(), trials.end(), [](const TrialOutcome& t) { return !t.converged; }));
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t i) { return splitmix64(master + i); }

std::size_t bench_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WBP_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

GapReference choose_gap_reference(const BarycenterProblem& problem) {
  return problem.m() * problem.n() * problem.n() <= kLpMaxVariables ? GapReference::lp
                                                                    : GapReference::ibp_dual;
}

double reference_dual_value(const BarycenterProblem& problem, double eta, std::size_t max_iterations) {
  SolverOptions opts;
  opts.max_iterations = max_iterations;
  opts.check_every = 10;
  try {
    return ibp_solve(problem, eta, 1e-13, opts).report.objective_history.back().value;
  } catch (const NonConvergenceError& e) {
    return e.report().objective_history.back().value;
  }
}

BenchResult run_bench(const BarycenterProblem& problem, const BenchOptions& options) {
  if (options.trials == 0) throw InputError("bench: need at least one trial");
  if (options.etas.empty()) throw InputError("bench: empty eta grid");
  for (double eta : options.etas)
    if (!(eta > 0.0)) throw InputError("bench: every eta must be positive");
  if (!(problem.min_weight() > 0.0))
    throw DomainError("bench: weights must be strictly positive for the unsmoothed solvers");

  BenchResult result;
  result.instance_hash = instance_hash(problem);
  result.gap_reference = choose_gap_reference(problem);
  std::optional<double> lp_value;
  if (result.gap_reference == GapReference::lp) lp_value = solve_lp_exact(problem).value;

  const std::size_t threads = bench_threads(options.threads);
  for (double eta : options.etas) {
    result.reference_values.push_back(lp_value ? *lp_value : reference_dual_value(problem, eta));
    for (bool accelerated : {false, true}) {
      BenchRow row;
      row.eta = eta;
      row.algorithm = accelerated ? "aibp" : "ibp";
      std::vector<TrialRun> runs(options.trials);
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i = next++; i < options.trials; i = next++) {
          SolverOptions so = options.solver;
          so.record_primal = so.record_primal || (i == 0 && options.csv_dir && lp_value);
          runs[i] = run_trial(problem, accelerated, eta, options.eps_prime,
                              trial_seed(options.seed, i), so);
        }
      };
      std::vector<std::thread> pool;
      const std::size_t spawn = std::min(threads, options.trials);
      for (std::size_t w = 1; w < spawn; ++w) pool.emplace_back(worker);
      worker();
      for (std::thread& th : pool) th.join();

      if (options.csv_dir) {
        std::filesystem::create_directories(*options.csv_dir);
        write_file(*options.csv_dir / (row.algorithm + "_eta" + eta_label(eta) + ".csv"),
                   trace_csv(runs[0].report, result.gap_reference, result.reference_values.back()));
      }
      for (TrialRun& r : runs) row.trials.push_back(r.outcome);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::string format_bench_table(const BenchResult& result) {
  std::ostringstream s;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %-5s %24s %26s %14s %9s\n", "eta", "alg", "iterations (mean +- std)",
                "time ms (mean +- std)", "primal (mean)", "failures");
  s << line;
  for (const BenchRow& row : result.rows) {
    char iters[64], times[64];
    std::snprintf(iters, sizeof iters, "%.1f +- %.1f", row.iteration_mean(), row.iteration_std());
    std::snprintf(times, sizeof times, "%.3f +- %.3f", row.time_mean(), row.time_std());
    std::snprintf(line, sizeof line, "%-8g %-5s %24s %26s %14.8f %9zu\n", row.eta, row.algorithm.c_str(), iters,
                  times, row.primal_mean(), row.failures());
    s << line;
  }
  s << "gap reference: " << gap_reference_name(result.gap_reference) << '\n';
  return s.str();
}

Json bench_to_json(const BenchResult& result) {
  Json rows = Json::array();
  for (const BenchRow& row : result.rows) {
    Json trials = Json::array();
    for (const TrialOutcome& t : row.trials)
      trials.push_back({{"seed", t.seed},
                        {"iterations", t.iterations},
                        {"wall_time_ms", t.wall_time_ms},
                        {"primal_value", t.primal_value},
                        {"estimate_restarts", t.estimate_restarts},
                        {"converged", t.converged}});
    rows.push_back({{"eta", row.eta},
                    {"algorithm", row.algorithm},
                    {"iterations_mean", row.iteration_mean()},
                    {"iterations_std", row.iteration_std()},
                    {"time_ms_mean", row.time_mean()},
                    {"time_ms_std", row.time_std()},
                    {"primal_mean", row.primal_mean()},
                    {"trials", std::move(trials)}});
  }
  return {{"instance_hash", result.instance_hash},
          {"gap_reference", gap_reference_name(result.gap_reference)},
          {"reference_values", result.reference_values},
          {"rows", std::move(rows)}};
}

}  // namespace wbp::app
