#pragma once

#include <cstddef>
#include <vector>

#include "wbp/constraint.hpp"
#include "wbp/core.hpp"
#include "wbp/simplex.hpp"

namespace wbp {

/// Largest variable count m n^2 the dense oracle accepts.
inline constexpr std::size_t kLpMaxVariables = 5000;

/// min c^T x s.t. A x = b, x >= 0 over x = (vec X_1, ..., vec X_m).
struct StandardFormLP {
  ConstraintMatrix A;
  /// (-u_1, u_2, ..., (-1)^m u_m, 0, ..., 0)
  Vector b;
  /// omega_k vec(C_k), blockwise
  Vector c;

  std::size_t m() const { return A.m(); }
  std::size_t n() const { return A.n(); }
  std::size_t variables() const { return A.cols(); }
};

StandardFormLP assemble_lp(const BarycenterProblem& problem);

struct LpSolution {
  double value = 0.0;
  PlanStack plans;
  Vector barycenter;
  Vector x;
  std::size_t pivots = 0;
};

/// Vertex optimum of the barycenter LP. Throws SizeError above kLpMaxVariables and SolverError
/// when the simplex breaks down. The barycenter is l(X_1); every l(X_k) is checked against it.
LpSolution solve_lp_exact(const StandardFormLP& lp, const SimplexOptions& options = {});

/// assemble_lp followed by solve_lp_exact.
LpSolution solve_lp_exact(const BarycenterProblem& problem, const SimplexOptions& options = {});

/// Splits (vec X_1, ..., vec X_m) back into plans.
std::vector<Matrix> unvectorize_plans(const Vector& x, std::size_t m, std::size_t n);

}  // namespace wbp
