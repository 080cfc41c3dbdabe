#pragma once

#include "wbp/solver.hpp"

namespace wbp {

/// Exact minimization over lambda: lambda_k <- log u_k - log(e^{-C_k/eta} diag(e^{tau_k}) 1).
/// Afterwards every r(B_k) equals u_k. Requires u_k > 0.
DualState ibp_row_update(const DualState& state, const BarycenterProblem& problem, double eta);

/// Exact minimization over tau in P: tau_k <- tau_k + sum_j omega_j log l_j - log l_k.
/// Afterwards every l(B_k) equals the omega-weighted geometric mean of the old ones.
DualState ibp_col_update(const DualState& state, const BarycenterProblem& problem, double eta);

// In-place forms used by the solvers; `objective` fixes the problem and eta.
void ibp_row_update(const DualObjective& objective, DualState& state);
void ibp_row_update(const DualObjective& objective, DualState& state, const Matrix& log_rows);
void ibp_col_update(const DualObjective& objective, DualState& state);
void ibp_col_update(const DualObjective& objective, DualState& state, const Matrix& log_cols);

/// Iterative Bregman projection: alternate column and row updates from the zero dual until the
/// residue after a column update is at most `eps_prime`.
SolveResult ibp_solve(const BarycenterProblem& problem, double eta, double eps_prime,
                      const SolverOptions& options = {});

}  // namespace wbp
