#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "wbp/solver.hpp"

namespace wbp {

/// Iterate of the accelerated method. `check` is the monotone safeguarded sequence and `tilde`
/// the estimate sequence; theta follows the Nesterov recursion from theta_0 = 1.
struct AibpState {
  std::size_t t = 0;
  double theta = 1.0;
  DualState check;
  DualState tilde;
  /// One draw per iteration; the top bit of the 64-bit output is the block choice.
  std::mt19937_64 rng;
  /// Times the estimate sequence was reset to `check` after leaving double range.
  std::size_t restarts = 0;

  static AibpState initial(std::size_t m, std::size_t n, std::uint64_t seed);
};

/// Every intermediate of one iteration, for property checks and tracing.
struct AibpStepTrace {
  std::size_t t = 0;
  double theta = 0.0;
  int xi = 0;  ///< 0: lambda-block gradient step, 1: tau-block prox step
  bool took_hat = false;
  bool restarted = false;  ///< the estimate sequence was reset this iteration
  DualState check_before;
  DualState tilde_before;
  DualState bar;
  DualState tilde_after;
  DualState hat;
  DualState acute;
  DualState iterate;  ///< (lambda^t, tau^t), the reported iterate
  DualState check_after;
  double phi_check_before = 0.0;
  double phi_hat = 0.0;
  double phi_iterate = 0.0;
  double phi_check_after = 0.0;
  Matrix iterate_rows;  ///< r(B_k) at the iterate, row k per block
};

/// theta (sqrt(theta^2 + 4) - theta) / 2, the positive root of x^2 = theta^2 (1 - x).
double theta_next(double theta);

/// Minimizer over tau in P of sum_k omega_k [(tau_k - bar_k)^T l_k + 4 eta theta ||tau_k - tilde_k||^2],
/// namely tilde_k - (l_k - sum_j omega_j l_j) / (8 eta theta). `l` holds l(B_k) at bar row-wise;
/// `bar_tau` only shifts the objective by a constant.
Matrix tau_prox_closed_form(const Matrix& tilde_tau, const Matrix& bar_tau, const Matrix& l,
                            const Vector& omega, double eta, double theta);

/// One iteration in place. The reported iterate is written to `iterate` and its row marginals
/// to `iterate_rows`.
void aibp_step(AibpState& state, const DualObjective& objective, DualState& iterate,
               Matrix& iterate_rows, AibpStepTrace* trace = nullptr);

/// Functional form: returns the state after one iteration.
AibpState aibp_step(const AibpState& state, const BarycenterProblem& problem, double eta);

/// Runs iterations until the residue of the reported iterate is at most `eps_prime`.
SolveResult aibp_solve(const BarycenterProblem& problem, double eta, double eps_prime,
                       std::uint64_t seed, const SolverOptions& options = {});

struct BarycenterResult {
  Vector barycenter;
  PlanStack plans;
  SolveReport report;
  double primal_value = 0.0;
  /// The smoothed problem that was handed to the inner solver.
  Matrix smoothed_weights;
};

struct PipelineParameters {
  double eta = 0.0;
  double eps_prime = 0.0;
};

/// eta = eps / (4 log n) and eps' = eps / (8 max C); std::nullopt when n = 1 or every cost is
/// zero, where the answer is trivial.
std::optional<PipelineParameters> pipeline_parameters(const BarycenterProblem& problem, double epsilon);

/// (1 - eps'/4) u_k + eps' / (4n) for every k.
Matrix smooth_weights(const Matrix& weights, double eps_prime);

/// The full pipeline: pick eta = eps / (4 log n) and eps' = eps / (8 max C), smooth the weights,
/// run the inner solver to residue eps'/2 and round against the original weights.
///
/// For n = 1 or all-zero costs the exact answer is returned directly (sum_k omega_k u_k with
/// product plans), and the report records zero iterations.
BarycenterResult barycenter_aibp(const BarycenterProblem& problem, double epsilon,
                                 std::uint64_t seed, const SolverOptions& options = {});

/// Same pipeline with IBP as the inner solver, for like-for-like comparisons.
BarycenterResult barycenter_ibp(const BarycenterProblem& problem, double epsilon,
                                const SolverOptions& options = {});

}  // namespace wbp
