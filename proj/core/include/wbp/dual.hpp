#pragma once

#include <cstddef>

#include "wbp/core.hpp"

namespace wbp {

/// Dual variables of the entropic barycenter problem. Row k of `lambda` is lambda_k and row k
/// of `tau` is tau_k; both are m x n. Feasibility means sum_k omega_k tau_k = 0.
struct DualState {
  Matrix lambda;
  Matrix tau;

  static DualState zeros(std::size_t m, std::size_t n);
};

/// Dual feasibility tolerance on || sum_k omega_k tau_k ||_inf.
inline constexpr double kDualFeasibilityTol = 1e-10;

/// || sum_k omega_k tau_k ||_inf
double tau_constraint_violation(const Matrix& tau, const Vector& omega);

struct DualRadii {
  double r_lambda = 0.0;
  double r_tau = 0.0;
  std::size_t n = 0;

  /// l2 bounds on an optimal lambda_k / tau_k block.
  double l2_lambda() const;
  double l2_tau() const;
};

/// Row marginals r(B_k) and column marginals l(B_k), in log form, for all k.
struct LogMarginals {
  Matrix log_rows;
  Matrix log_cols;
};

/// The dual objective phi(lambda, tau) = sum_k omega_k (1^T B_k 1 - lambda_k^T u_k) for a fixed
/// problem and regularization, with log B_k = lambda_ki + tau_kj - C_k,ij / eta.
///
/// All marginals go through log-sum-exp; B is never formed during evaluation, so the small eta
/// used for barycenter accuracy targets does not overflow.
class DualObjective {
 public:
  DualObjective(const BarycenterProblem& problem, double eta);

  const BarycenterProblem& problem() const { return *problem_; }
  double eta() const { return eta_; }
  std::size_t m() const { return problem_->m(); }
  std::size_t n() const { return problem_->n(); }

  /// log r(B_k) for every block.
  Matrix log_row_marginals(const DualState& state) const;
  /// log l(B_k) for every block.
  Matrix log_col_marginals(const DualState& state) const;
  LogMarginals log_marginals(const DualState& state) const;

  /// log B_k as an n x n matrix.
  Matrix log_B(std::size_t k, const DualState& state) const;

  double phi(const DualState& state) const;
  /// phi from already-computed log row marginals of `state`.
  double phi_from_log_rows(const DualState& state, const Matrix& log_rows) const;

  /// (d phi / d lambda, d phi / d tau), each m x n.
  std::pair<Matrix, Matrix> gradient(const DualState& state) const;

 private:
  const BarycenterProblem* problem_;
  double eta_;
  std::vector<Matrix> scaled_costs_;    // -C_k / eta
  std::vector<Matrix> scaled_costs_t_;  // transposed, so row-wise sums read contiguous memory
};

/// Linear-domain B_k. Throws InternalError when an entry would overflow a double;
/// callers that can hit that regime must stay on the log-marginal path.
Matrix compute_B(const Vector& lambda_k, const Vector& tau_k, const Matrix& cost_k, double eta);

double phi(const DualState& state, const BarycenterProblem& problem, double eta);

std::pair<Matrix, Matrix> grad_phi(const DualState& state, const BarycenterProblem& problem,
                                   double eta);

/// Norm bounds satisfied by some optimal dual solution. Requires every u_kj > 0.
DualRadii dual_radii(const BarycenterProblem& problem, double eta);

/// Shift-and-average construction that maps a dual optimum to one obeying the radii bounds.
/// Every B_k, the phi value and the tau constraint are preserved.
DualState canonicalize_dual(const DualState& state, const BarycenterProblem& problem);

/// tau_k <- tau_k - sum_j omega_j tau_j; restores sum_k omega_k tau_k = 0.
Matrix project_onto_P(const Matrix& tau, const Vector& omega);

/// log(sum_i exp(v_i)), stable for large magnitudes; -inf for an all -inf input.
double log_sum_exp(const Eigen::Ref<const Vector>& v);

}  // namespace wbp
