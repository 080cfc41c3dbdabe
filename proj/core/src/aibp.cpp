#include "wbp/aibp.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "wbp/ibp.hpp"
#include "wbp/rounding.hpp"

namespace wbp {

namespace {

// exp() of anything above this is within a factor e^9 of overflow.
constexpr double kEstimateOverflow = 700.0;

void require_finite(const Matrix& x, const char* what, std::size_t t) {
  if (!x.allFinite())
    throw InternalError(std::string("AIBP: non-finite ") + what + " at iteration " +
                        std::to_string(t));
}

DualState lerp(const DualState& a, const DualState& b, double theta) {
  return {(1.0 - theta) * a.lambda + theta * b.lambda, (1.0 - theta) * a.tau + theta * b.tau};
}

// phi at a state whose rows match u exactly: every B_k has unit mass.
double phi_row_feasible(const BarycenterProblem& problem, const DualState& state) {
  double total = 0.0;
  for (std::size_t k = 0; k < problem.m(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    total += problem.omega(k) * (1.0 - state.lambda.row(kk).dot(problem.weights().row(kk)));
  }
  return total;
}

// Whether the cached phi of `check` is still unknown.
bool unknown(double v) { return std::isnan(v); }

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

// phi(check) is kept alongside the state so the step never recomputes it.
struct Cache {
  double phi_check = std::numeric_limits<double>::quiet_NaN();
};

void step_impl(AibpState& state, const DualObjective& objective, DualState& iterate,
               Matrix& iterate_rows, AibpStepTrace* trace, Cache& cache) {
  const BarycenterProblem& problem = objective.problem();
  const double eta = objective.eta();
  const double theta = state.theta;
  const std::size_t t = state.t;

  if (unknown(cache.phi_check)) cache.phi_check = objective.phi(state.check);
  if (trace) {
    trace->t = t;
    trace->theta = theta;
    trace->check_before = state.check;
    trace->tilde_before = state.tilde;
    trace->phi_check_before = cache.phi_check;
  }

  // Step 1
  DualState bar = lerp(state.check, state.tilde, theta);

  // Step 2: only the marginal of the drawn block is needed. When the estimate sequence has run
  // off far enough that this marginal leaves double range, it is reset to the safeguarded
  // iterate; Steps 4-6 do not depend on it, so descent and feasibility are unaffected.
  const int xi = static_cast<int>(state.rng() >> 63);
  auto drawn_marginal = [&](const DualState& at) {
    return xi == 0 ? objective.log_row_marginals(at) : objective.log_col_marginals(at);
  };
  Matrix log_marginal = drawn_marginal(bar);
  bool restarted = false;
  if (!log_marginal.allFinite() || log_marginal.maxCoeff() > kEstimateOverflow) {
    state.tilde = state.check;
    bar = state.check;
    log_marginal = drawn_marginal(bar);
    restarted = true;
    ++state.restarts;
  }
  const Matrix marginal = log_marginal.array().exp().matrix();
  require_finite(marginal, "marginals at the extrapolated point", t);
  const DualState tilde_old = state.tilde;
  if (xi == 0) {
    state.tilde.lambda -= (marginal - problem.weights()) / (8.0 * eta * theta);
  } else {
    state.tilde.tau = project_onto_P(
        tau_prox_closed_form(state.tilde.tau, bar.tau, marginal, problem.omega(), eta, theta),
        problem.omega());
  }

  // Step 3
  DualState hat{bar.lambda + 2.0 * theta * (state.tilde.lambda - tilde_old.lambda),
                bar.tau + 2.0 * theta * (state.tilde.tau - tilde_old.tau)};

  // Step 4: the incumbent wins ties and any non-finite comparison.
  const double phi_hat = objective.phi(hat);
  const bool take_hat = phi_hat < cache.phi_check;
  const DualState& acute = take_hat ? hat : state.check;

  // Step 5
  const Matrix log_cols = objective.log_col_marginals(acute);
  require_finite(log_cols, "column marginals at the selected point", t);
  iterate.lambda = acute.lambda;
  iterate.tau = acute.tau;
  ibp_col_update(objective, iterate, log_cols);

  // Step 6
  const Matrix log_rows = objective.log_row_marginals(iterate);
  require_finite(log_rows, "row marginals at the iterate", t);
  iterate_rows = log_rows.array().exp().matrix();
  const double phi_iterate = objective.phi_from_log_rows(iterate, log_rows);

  if (trace) {
    trace->xi = xi;
    trace->took_hat = take_hat;
    trace->restarted = restarted;
    trace->bar = bar;
    trace->tilde_after = state.tilde;
    trace->hat = hat;
    trace->acute = acute;
    trace->iterate = iterate;
    trace->phi_hat = phi_hat;
    trace->phi_iterate = phi_iterate;
    trace->iterate_rows = iterate_rows;
  }

  state.check.lambda = iterate.lambda;
  ibp_row_update(objective, state.check, log_rows);
  state.check.tau = iterate.tau;
  cache.phi_check = phi_row_feasible(problem, state.check);
  require_finite(state.check.lambda, "safeguarded iterate", t);

  if (trace) {
    trace->check_after = state.check;
    trace->phi_check_after = cache.phi_check;
  }

  // Steps 7-8
  state.theta = theta_next(theta);
  ++state.t;
}

}  // namespace

AibpState AibpState::initial(std::size_t m, std::size_t n, std::uint64_t seed) {
  AibpState s;
  s.check = DualState::zeros(m, n);
  s.tilde = DualState::zeros(m, n);
  s.rng.seed(seed);
  return s;
}

double theta_next(double theta) {
  return theta * (std::sqrt(theta * theta + 4.0) - theta) / 2.0;
}

Matrix tau_prox_closed_form(const Matrix& tilde_tau, const Matrix& bar_tau, const Matrix& l,
                            const Vector& omega, double eta, double theta) {
  if (tilde_tau.rows() != l.rows() || tilde_tau.cols() != l.cols() ||
      bar_tau.rows() != l.rows() || bar_tau.cols() != l.cols() || omega.size() != l.rows())
    throw InputError("tau_prox_closed_form: dimension mismatch");
  if (!(eta > 0.0) || !(theta > 0.0)) throw DomainError("eta and theta must be positive");
  const Eigen::RowVectorXd mean = omega.transpose() * l;
  Matrix centered = l;
  centered.rowwise() -= mean;
  return tilde_tau - centered / (8.0 * eta * theta);
}

void aibp_step(AibpState& state, const DualObjective& objective, DualState& iterate,
               Matrix& iterate_rows, AibpStepTrace* trace) {
  Cache cache;
  step_impl(state, objective, iterate, iterate_rows, trace, cache);
}

AibpState aibp_step(const AibpState& state, const BarycenterProblem& problem, double eta) {
  const DualObjective objective(problem, eta);
  AibpState next = state;
  DualState iterate;
  Matrix rows;
  aibp_step(next, objective, iterate, rows);
  return next;
}

SolveResult aibp_solve(const BarycenterProblem& problem, double eta, double eps_prime,
                       std::uint64_t seed, const SolverOptions& options) {
  if (!(eps_prime > 0.0)) throw DomainError("eps_prime must be positive");
  if (options.check_every == 0) throw InputError("check_every must be at least 1");
  if (!(problem.min_weight() > 0.0))
    throw DomainError("AIBP needs strictly positive weights; smooth the input first");
  const auto start = std::chrono::steady_clock::now();
  const DualObjective objective(problem, eta);

  SolveReport report;
  report.algorithm = "aibp";
  report.eta = eta;
  report.eps_prime = eps_prime;
  report.seed = seed;

  AibpState state = AibpState::initial(problem.m(), problem.n(), seed);
  Cache cache;
  DualState iterate;
  Matrix rows;
  for (;;) {
    const std::size_t t = state.t;
    step_impl(state, objective, iterate, rows, nullptr, cache);
    if (t % options.check_every == 0) {
      const double e = residue_from_rows(problem, rows);
      report.residue_history.push_back({t, e});
      report.objective_history.push_back({t, objective.phi_from_log_rows(
                                                 iterate, rows.array().log().matrix())});
      if (options.record_primal) {
        const auto b = materialize_B(objective, iterate);
        const PlanStack rounded = round_plans(b, problem.weights(), problem.omega());
        report.primal_history.push_back({t, primal_objective(problem, rounded.plans)});
      }
      if (e <= eps_prime) {
        report.iterations = t;
        report.estimate_restarts = state.restarts;
        SolveResult result;
        result.plans.plans = materialize_B(objective, iterate);
        result.dual = std::move(iterate);
        report.wall_time_ms = elapsed_ms(start);
        result.report = std::move(report);
        return result;
      }
    }
    if (t >= options.max_iterations) {
      report.iterations = t;
      report.estimate_restarts = state.restarts;
      report.wall_time_ms = elapsed_ms(start);
      throw NonConvergenceError("AIBP did not reach the residue target within " +
                                    std::to_string(options.max_iterations) + " iterations",
                                std::move(report), std::move(iterate));
    }
  }
}

std::optional<PipelineParameters> pipeline_parameters(const BarycenterProblem& problem, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be positive");
  const double max_c = problem.max_cost();
  if (problem.n() == 1 || max_c == 0.0) return std::nullopt;
  PipelineParameters out;
  out.eta = epsilon / (4.0 * std::log(static_cast<double>(problem.n())));
  out.eps_prime = epsilon / (8.0 * max_c);
  if (out.eps_prime > 4.0) throw DomainError("epsilon is too large relative to the cost scale");
  return out;
}

Matrix smooth_weights(const Matrix& weights, double eps_prime) {
  if (!(eps_prime >= 0.0) || eps_prime > 4.0) throw DomainError("smoothing needs 0 <= eps' <= 4");
  const double n = static_cast<double>(weights.cols());
  return ((1.0 - eps_prime / 4.0) * weights.array() + eps_prime / (4.0 * n)).matrix();
}

namespace {

BarycenterResult trivial_barycenter(const BarycenterProblem& problem, const std::string& alg,
                                    std::uint64_t seed) {
  BarycenterResult out;
  Vector u_hat = problem.weights().transpose() * problem.omega();
  u_hat /= u_hat.sum();
  for (std::size_t k = 0; k < problem.m(); ++k)
    out.plans.plans.push_back(problem.u(k) * u_hat.transpose());
  out.plans.barycenter = u_hat;
  out.barycenter = u_hat;
  out.primal_value = primal_objective(problem, out.plans.plans);
  out.smoothed_weights = problem.weights();
  out.report.algorithm = alg;
  out.report.seed = seed;
  out.report.residue_history.push_back({0, 0.0});
  out.report.objective_history.push_back({0, out.primal_value});
  return out;
}

template <class Solve>
BarycenterResult barycenter_pipeline(const BarycenterProblem& problem, double epsilon,
                                     const std::string& alg, std::uint64_t seed, Solve&& solve) {
  const auto params = pipeline_parameters(problem, epsilon);
  if (!params) return trivial_barycenter(problem, alg, seed);
  const double eta = params->eta;
  const double eps_prime = params->eps_prime;

  BarycenterResult out;
  out.smoothed_weights = smooth_weights(problem.weights(), eps_prime);
  const BarycenterProblem smoothed = problem.with_weights(out.smoothed_weights);
  SolveResult inner = solve(smoothed, eta, eps_prime / 2.0);
  out.plans = round_plans(inner.plans.plans, problem.weights(), problem.omega());
  out.barycenter = *out.plans.barycenter;
  out.primal_value = primal_objective(problem, out.plans.plans);
  out.report = std::move(inner.report);
  return out;
}

}  // namespace

BarycenterResult barycenter_aibp(const BarycenterProblem& problem, double epsilon,
                                 std::uint64_t seed, const SolverOptions& options) {
  return barycenter_pipeline(problem, epsilon, "aibp", seed,
                             [&](const BarycenterProblem& p, double eta, double target) {
                               return aibp_solve(p, eta, target, seed, options);
                             });
}

BarycenterResult barycenter_ibp(const BarycenterProblem& problem, double epsilon,
                                const SolverOptions& options) {
  return barycenter_pipeline(problem, epsilon, "ibp", 0,
                             [&](const BarycenterProblem& p, double eta, double target) {
                               return ibp_solve(p, eta, target, options);
                             });
}

}  // namespace wbp
