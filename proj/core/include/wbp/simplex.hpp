#pragma once

#include <cstddef>
#include <vector>

#include "wbp/core.hpp"

namespace wbp {

struct SimplexOptions {
  double pivot_tol = 1e-9;
  /// Consecutive degenerate pivots under largest-coefficient pricing before Bland's rule
  /// takes over (and stays on until the objective moves again).
  std::size_t degenerate_switch = 50;
  std::size_t max_pivots = 1'000'000;
};

struct SimplexResult {
  Vector x;
  double value = 0.0;
  /// Basic variable per retained row; rows found redundant in phase one are dropped.
  std::vector<std::size_t> basis;
  std::size_t pivots = 0;
};

/// min c^T x subject to A x = b, x >= 0, by a two-phase dense tableau method.
///
/// The final basic solution is recomputed from the original data by a direct solve, so the
/// returned x satisfies A x = b to working precision. Throws SolverError when the problem is
/// infeasible or unbounded or when no pivot exceeds the tolerance.
SimplexResult simplex_solve(const Matrix& A, const Vector& b, const Vector& c,
                            const SimplexOptions& options = {});

}  // namespace wbp
