#include "wbp/ibp.hpp"

#include <chrono>
#include <cmath>

#include "wbp/rounding.hpp"

namespace wbp {

namespace {

void require_positive_weights(const BarycenterProblem& problem) {
  if (!(problem.min_weight() > 0.0))
    throw DomainError("IBP row update needs strictly positive weights; smooth the input first");
}

}  // namespace

void ibp_row_update(const DualObjective& objective, DualState& state, const Matrix& log_rows) {
  const Matrix log_u = objective.problem().weights().array().log().matrix();
  state.lambda += log_u - log_rows;
}

void ibp_row_update(const DualObjective& objective, DualState& state) {
  require_positive_weights(objective.problem());
  ibp_row_update(objective, state, objective.log_row_marginals(state));
}

void ibp_col_update(const DualObjective& objective, DualState& state, const Matrix& log_cols) {
  const Eigen::RowVectorXd mean = objective.problem().omega().transpose() * log_cols;
  state.tau -= log_cols;
  state.tau.rowwise() += mean;
}

void ibp_col_update(const DualObjective& objective, DualState& state) {
  ibp_col_update(objective, state, objective.log_col_marginals(state));
}

DualState ibp_row_update(const DualState& state, const BarycenterProblem& problem, double eta) {
  const DualObjective objective(problem, eta);
  DualState out = state;
  ibp_row_update(objective, out);
  return out;
}

DualState ibp_col_update(const DualState& state, const BarycenterProblem& problem, double eta) {
  const DualObjective objective(problem, eta);
  DualState out = state;
  ibp_col_update(objective, out);
  return out;
}

SolveResult ibp_solve(const BarycenterProblem& problem, double eta, double eps_prime,
                      const SolverOptions& options) {
  if (!(eps_prime > 0.0)) throw DomainError("eps_prime must be positive");
  if (options.check_every == 0) throw InputError("check_every must be at least 1");
  require_positive_weights(problem);
  const auto start = std::chrono::steady_clock::now();
  const DualObjective objective(problem, eta);

  SolveReport report;
  report.algorithm = "ibp";
  report.eta = eta;
  report.eps_prime = eps_prime;

  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };

  DualState state = DualState::zeros(problem.m(), problem.n());
  for (std::size_t t = 0;; ++t) {
    ibp_col_update(objective, state);
    state.tau = project_onto_P(state.tau, problem.omega());
    Matrix log_rows = objective.log_row_marginals(state);
    if (!log_rows.allFinite())
      throw InternalError("IBP: non-finite row marginals at iteration " + std::to_string(t));
    if (t % options.check_every == 0) {
      const double e = residue_from_rows(problem, log_rows.array().exp().matrix());
      report.residue_history.push_back({t, e});
      report.objective_history.push_back({t, objective.phi_from_log_rows(state, log_rows)});
      if (options.record_primal) {
        const auto b = materialize_B(objective, state);
        const PlanStack rounded = round_plans(b, problem.weights(), problem.omega());
        report.primal_history.push_back({t, primal_objective(problem, rounded.plans)});
      }
      if (e <= eps_prime) {
        report.iterations = t;
        SolveResult result;
        result.plans.plans = materialize_B(objective, state);
        result.dual = std::move(state);
        report.wall_time_ms = elapsed_ms();
        result.report = std::move(report);
        return result;
      }
    }
    if (t >= options.max_iterations) {
      report.iterations = t;
      report.wall_time_ms = elapsed_ms();
      throw NonConvergenceError("IBP did not reach the residue target within " +
                                    std::to_string(options.max_iterations) + " iterations",
                                std::move(report), std::move(state));
    }
    ibp_row_update(objective, state, log_rows);
  }
}

}  // namespace wbp
