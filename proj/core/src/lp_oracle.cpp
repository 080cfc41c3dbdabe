#include "wbp/lp_oracle.hpp"

#include <cmath>

namespace wbp {

StandardFormLP assemble_lp(const BarycenterProblem& problem) {
  const std::size_t m = problem.m();
  const std::size_t n = problem.n();
  StandardFormLP lp{ConstraintMatrix(m, n), Vector::Zero(static_cast<Eigen::Index>(2 * m * n - n)),
                    Vector::Zero(static_cast<Eigen::Index>(m * n * n))};
  for (std::size_t k = 0; k < m; ++k) {
    const double sign = (k + 1) % 2 == 0 ? 1.0 : -1.0;
    lp.b.segment(static_cast<Eigen::Index>(k * n), static_cast<Eigen::Index>(n)) = sign * problem.u(k);
    const Matrix& cost = problem.cost(k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        lp.c(static_cast<Eigen::Index>(lp.A.column_of(k, i, j))) =
            problem.omega(k) * cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return lp;
}

std::vector<Matrix> unvectorize_plans(const Vector& x, std::size_t m, std::size_t n) {
  if (static_cast<std::size_t>(x.size()) != m * n * n)
    throw InputError("unvectorize_plans: length is not m n^2");
  std::vector<Matrix> plans;
  plans.reserve(m);
  const auto nn = static_cast<Eigen::Index>(n);
  for (std::size_t k = 0; k < m; ++k) {
    Matrix x_k(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i)
      for (Eigen::Index j = 0; j < nn; ++j)
        x_k(i, j) = x(static_cast<Eigen::Index>(k * n * n) + i * nn + j);
    plans.push_back(std::move(x_k));
  }
  return plans;
}

LpSolution solve_lp_exact(const StandardFormLP& lp, const SimplexOptions& options) {
  if (lp.variables() > kLpMaxVariables)
    throw SizeError("LP oracle limited to m n^2 <= " + std::to_string(kLpMaxVariables) +
                    " variables, got " + std::to_string(lp.variables()));
  const SimplexResult sr = simplex_solve(lp.A.dense_real(), lp.b, lp.c, options);

  LpSolution out;
  out.x = sr.x;
  out.value = sr.value;
  out.pivots = sr.pivots;
  out.plans.plans = unvectorize_plans(sr.x, lp.m(), lp.n());
  out.barycenter = col_sums(out.plans.plans.front());
  for (const auto& x_k : out.plans.plans) {
    if ((col_sums(x_k) - out.barycenter).cwiseAbs().maxCoeff() > 1e-9)
      throw SolverError("LP oracle: column marginals of the optimal plans disagree");
  }
  out.plans.barycenter = out.barycenter;
  return out;
}

LpSolution solve_lp_exact(const BarycenterProblem& problem, const SimplexOptions& options) {
  const std::size_t vars = problem.m() * problem.n() * problem.n();
  if (vars > kLpMaxVariables)
    throw SizeError("LP oracle limited to m n^2 <= " + std::to_string(kLpMaxVariables) +
                    " variables, got " + std::to_string(vars));
  return solve_lp_exact(assemble_lp(problem), options);
}

}  // namespace wbp
