#include "wbp/core.hpp"

#include <cmath>
#include <cstring>

namespace wbp {

namespace {

void check_probability_vector(const Eigen::Ref<const Vector>& v, const std::string& what) {
  if (v.size() == 0) throw InputError(what + " is empty");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) || v(i) < 0.0)
      throw InputError(what + " has a negative or non-finite entry");
  }
  if (std::abs(v.sum() - 1.0) > kSimplexTol) throw InputError(what + " does not sum to 1");
}

void check_plan_count(const BarycenterProblem& problem, std::span<const Matrix> plans) {
  if (plans.size() != problem.m())
    throw InputError("plan count does not match the number of measures");
  const auto n = static_cast<Eigen::Index>(problem.n());
  for (const auto& x : plans) {
    if (x.rows() != n || x.cols() != n) throw InputError("plan dimensions do not match n x n");
  }
}

}  // namespace

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::euclidean:
      return "euclidean";
    case Metric::squared_euclidean:
      return "sqeuclidean";
    case Metric::manhattan:
      return "manhattan";
  }
  return "euclidean";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "sqeuclidean" || name == "squared_euclidean") return Metric::squared_euclidean;
  if (name == "manhattan") return Metric::manhattan;
  throw InputError("unknown metric '" + std::string(name) + "'");
}

void DiscreteMeasure::validate() const {
  if (support.rows() < 1 || support.cols() < 1) throw InputError("measure support is empty");
  if (support.rows() != weights.size())
    throw InputError("support size does not match weight length");
  if (!support.allFinite()) throw InputError("support has non-finite coordinates");
  check_probability_vector(weights, "measure weights");
}

BarycenterProblem::BarycenterProblem(Matrix support, Matrix weights, Vector omega,
                                     std::vector<Matrix> costs, double p, Metric metric)
    : support_(std::move(support)),
      weights_(std::move(weights)),
      omega_(std::move(omega)),
      costs_(std::move(costs)),
      p_(p),
      metric_(metric) {
  validate();
}

BarycenterProblem BarycenterProblem::from_measures(const std::vector<DiscreteMeasure>& measures,
                                                   Vector omega, double p, Metric metric) {
  if (measures.empty()) throw InputError("at least one measure is required");
  for (const auto& mu : measures) mu.validate();
  const Matrix& support = measures.front().support;
  for (const auto& mu : measures) {
    const bool same_shape =
        mu.support.rows() == support.rows() && mu.support.cols() == support.cols();
    // Bitwise comparison: the fixed-support setting never merges nearby points.
    if (!same_shape || std::memcmp(mu.support.data(), support.data(),
                                   sizeof(double) * static_cast<std::size_t>(support.size())) != 0)
      throw InputError("measures do not share an identical support");
  }
  const auto m = static_cast<Eigen::Index>(measures.size());
  Matrix weights(m, support.rows());
  for (Eigen::Index k = 0; k < m; ++k)
    weights.row(k) = measures[static_cast<std::size_t>(k)].weights.transpose();
  Matrix cost = build_cost_matrix(support, p, metric);
  std::vector<Matrix> costs(static_cast<std::size_t>(m), cost);
  return BarycenterProblem(support, std::move(weights), std::move(omega), std::move(costs), p,
                           metric);
}

BarycenterProblem BarycenterProblem::with_weights(Matrix weights) const {
  return BarycenterProblem(support_, std::move(weights), omega_, costs_, p_, metric_);
}

void BarycenterProblem::validate() const {
  if (weights_.rows() < 1 || weights_.cols() < 1) throw InputError("need m >= 1 and n >= 1");
  const auto m = weights_.rows();
  const auto n = weights_.cols();
  if (support_.rows() != n) throw InputError("support size does not match weight length");
  if (support_.size() > 0 && !support_.allFinite())
    throw InputError("support has non-finite coordinates");
  for (Eigen::Index k = 0; k < m; ++k)
    check_probability_vector(weights_.row(k).transpose(), "weights of measure " + std::to_string(k));
  if (omega_.size() != m) throw InputError("omega length does not match the number of measures");
  check_probability_vector(omega_, "omega");
  if (static_cast<Eigen::Index>(costs_.size()) != m)
    throw InputError("cost matrix count does not match the number of measures");
  for (const auto& c : costs_) {
    if (c.rows() != n || c.cols() != n) throw InputError("cost matrix is not n x n");
    if (!c.allFinite() || c.minCoeff() < 0.0)
      throw InputError("cost matrices must be finite and nonnegative");
  }
  if (!(p_ >= 1.0)) throw InputError("order exponent p must be >= 1");
}

double BarycenterProblem::max_cost() const {
  double best = 0.0;
  for (const auto& c : costs_) best = std::max(best, c.maxCoeff());
  return best;
}

bool PlanStack::is_feasible(const BarycenterProblem& problem, double tol) const {
  if (!barycenter || plans.size() != problem.m()) return false;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    if (plans[k].minCoeff() < 0.0) return false;
    if ((row_sums(plans[k]) - problem.u(k)).lpNorm<1>() > tol) return false;
    if ((col_sums(plans[k]) - *barycenter).lpNorm<1>() > tol) return false;
  }
  return true;
}

Vector row_sums(const Matrix& x) { return x.rowwise().sum(); }
Vector col_sums(const Matrix& x) { return x.colwise().sum().transpose(); }

Matrix build_cost_matrix(const Matrix& support, double p, Metric metric) {
  if (support.rows() < 1 || support.cols() < 1) throw InputError("support is empty");
  if (!(p >= 1.0)) throw InputError("order exponent p must be >= 1");
  if (!support.allFinite()) throw InputError("support has non-finite coordinates");
  const auto n = support.rows();
  Matrix c = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto diff = (support.row(i) - support.row(j)).eval();
      double d = 0.0;
      switch (metric) {
        case Metric::euclidean:
          d = diff.norm();
          break;
        case Metric::squared_euclidean:
          d = diff.squaredNorm();
          break;
        case Metric::manhattan:
          d = diff.cwiseAbs().sum();
          break;
      }
      const double v = p == 1.0 ? d : std::pow(d, p);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

double rho(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InputError("rho: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!(b(i) > 0.0)) throw DomainError("rho: b must be strictly positive");
    if (!(a(i) >= 0.0)) throw DomainError("rho: a must be nonnegative");
    total += b(i) - a(i);
    if (a(i) > 0.0) total += a(i) * std::log(a(i) / b(i));
  }
  return total;
}

double entropy(const Matrix& x) {
  double h = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double v = x(i, j);
      if (!(v >= 0.0)) throw DomainError("entropy: negative or NaN entry");
      if (v > 0.0) h += v - v * std::log(v);
    }
  }
  return h;
}

double primal_objective(const BarycenterProblem& problem, std::span<const Matrix> plans) {
  check_plan_count(problem, plans);
  double total = 0.0;
  for (std::size_t k = 0; k < plans.size(); ++k)
    total += problem.omega(k) * problem.cost(k).cwiseProduct(plans[k]).sum();
  return total;
}

double regularized_primal_objective(const BarycenterProblem& problem,
                                    std::span<const Matrix> plans, double eta) {
  check_plan_count(problem, plans);
  double total = 0.0;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    const double transport = problem.cost(k).cwiseProduct(plans[k]).sum();
    total += problem.omega(k) * (transport - eta * entropy(plans[k]));
  }
  return total;
}

double residue(const BarycenterProblem& problem, std::span<const Matrix> plans) {
  check_plan_count(problem, plans);
  Matrix rows(static_cast<Eigen::Index>(problem.m()), static_cast<Eigen::Index>(problem.n()));
  for (std::size_t k = 0; k < plans.size(); ++k)
    rows.row(static_cast<Eigen::Index>(k)) = row_sums(plans[k]).transpose();
  return residue_from_rows(problem, rows);
}

double residue_from_rows(const BarycenterProblem& problem, const Matrix& row_marginals) {
  if (row_marginals.rows() != problem.weights().rows() ||
      row_marginals.cols() != problem.weights().cols())
    throw InputError("row marginal dimensions do not match the problem");
  double total = 0.0;
  for (Eigen::Index k = 0; k < row_marginals.rows(); ++k) {
    total += problem.omega(static_cast<std::size_t>(k)) *
             (row_marginals.row(k) - problem.weights().row(k)).lpNorm<1>();
  }
  return total;
}

}  // namespace wbp
