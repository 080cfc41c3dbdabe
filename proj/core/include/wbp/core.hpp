#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wbp/errors.hpp"

namespace wbp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerance on the unit mass of probability vectors (weights and omega).
inline constexpr double kSimplexTol = 1e-12;
/// Tolerance on marginal feasibility of a plan stack, in l1.
inline constexpr double kFeasibilityTol = 1e-9;

enum class Metric { euclidean, squared_euclidean, manhattan };

std::string_view metric_name(Metric metric);
/// Accepts "euclidean", "sqeuclidean" (or "squared_euclidean") and "manhattan".
Metric parse_metric(std::string_view name);

/// A probability vector on a finite support in R^d. Rows of `support` are points.
struct DiscreteMeasure {
  Matrix support;
  Vector weights;

  void validate() const;
};

/// m weighted measures on one shared n-point support, with per-measure cost matrices.
///
/// Weights are stored as an m x n matrix whose k-th row is u_k. Every cost matrix is
/// n x n and entrywise nonnegative; omega lies in the m-simplex.
class BarycenterProblem {
 public:
  BarycenterProblem(Matrix support, Matrix weights, Vector omega, std::vector<Matrix> costs,
                    double p, Metric metric);

  /// Builds the costs d(x_i, x_j)^p from the shared support. Supports must match bitwise.
  static BarycenterProblem from_measures(const std::vector<DiscreteMeasure>& measures,
                                         Vector omega, double p, Metric metric);

  /// Same support, costs and omega with a different weight matrix.
  BarycenterProblem with_weights(Matrix weights) const;

  std::size_t m() const { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t n() const { return static_cast<std::size_t>(weights_.cols()); }

  const Matrix& support() const { return support_; }
  const Matrix& weights() const { return weights_; }
  Vector u(std::size_t k) const { return weights_.row(static_cast<Eigen::Index>(k)).transpose(); }
  const Vector& omega() const { return omega_; }
  double omega(std::size_t k) const { return omega_(static_cast<Eigen::Index>(k)); }
  const Matrix& cost(std::size_t k) const { return costs_[k]; }
  const std::vector<Matrix>& costs() const { return costs_; }
  double p() const { return p_; }
  Metric metric() const { return metric_; }

  /// max_k max_ij (C_k)_ij
  double max_cost() const;
  /// min_{k,j} u_kj
  double min_weight() const { return weights_.minCoeff(); }

 private:
  void validate() const;

  Matrix support_;
  Matrix weights_;
  Vector omega_;
  std::vector<Matrix> costs_;
  double p_;
  Metric metric_;
};

/// m transport plans and, once feasible, the induced barycenter.
struct PlanStack {
  std::vector<Matrix> plans;
  std::optional<Vector> barycenter;

  /// r(X_k) = u_k and l(X_k) = barycenter for every k, each within `tol` in l1.
  bool is_feasible(const BarycenterProblem& problem, double tol = kFeasibilityTol) const;
};

struct HistoryPoint {
  std::size_t iteration = 0;
  double value = 0.0;
};

struct SolveReport {
  std::string algorithm;
  std::size_t iterations = 0;
  std::vector<HistoryPoint> residue_history;
  /// Dual objective at each residue evaluation (the LP value for the exact oracle).
  std::vector<HistoryPoint> objective_history;
  /// Primal cost of the rounded iterate at each residue evaluation; filled on request.
  std::vector<HistoryPoint> primal_history;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
  double eta = 0.0;
  double eps_prime = 0.0;
  /// AIBP only: resets of the estimate sequence (see AibpState::restarts).
  std::size_t estimate_restarts = 0;

  double final_residue() const {
    return residue_history.empty() ? 0.0 : residue_history.back().value;
  }
};

Vector row_sums(const Matrix& x);
Vector col_sums(const Matrix& x);

/// C_ij = d(x_i, x_j)^p. For squared_euclidean the base distance is already squared.
Matrix build_cost_matrix(const Matrix& support, double p, Metric metric);

/// 1^T(b - a) + sum_i a_i log(a_i / b_i), with 0 log 0 = 0.
double rho(const Vector& a, const Vector& b);

/// H(X) = -<X, log X - 1 1^T>, with 0 log 0 = 0.
double entropy(const Matrix& x);

/// sum_k omega_k <C_k, X_k>
double primal_objective(const BarycenterProblem& problem, std::span<const Matrix> plans);

/// sum_k omega_k (<C_k, X_k> - eta H(X_k))
double regularized_primal_objective(const BarycenterProblem& problem,
                                    std::span<const Matrix> plans, double eta);

/// sum_k omega_k ||r(B_k) - u_k||_1 for the given plan (or B-matrix) stack.
double residue(const BarycenterProblem& problem, std::span<const Matrix> plans);

/// Same quantity from precomputed row marginals; row k of `row_marginals` is r(B_k).
double residue_from_rows(const BarycenterProblem& problem, const Matrix& row_marginals);

}  // namespace wbp
