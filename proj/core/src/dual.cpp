#include "wbp/dual.hpp"

#include <cmath>
#include <limits>

namespace wbp {

namespace {

constexpr double kMaxLinearExponent = 700.0;

// log sum_j exp(a_j + b_j) over contiguous arrays
double lse_of_sum(const double* a, const double* b, Eigen::Index n) {
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) hi = std::max(hi, a[j] + b[j]);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) s += std::exp(a[j] + b[j] - hi);
  return hi + std::log(s);
}

void check_state(const DualState& state, std::size_t m, std::size_t n) {
  const auto mm = static_cast<Eigen::Index>(m);
  const auto nn = static_cast<Eigen::Index>(n);
  if (state.lambda.rows() != mm || state.lambda.cols() != nn || state.tau.rows() != mm ||
      state.tau.cols() != nn)
    throw InputError("dual state dimensions do not match the problem");
}

}  // namespace

DualState DualState::zeros(std::size_t m, std::size_t n) {
  const auto mm = static_cast<Eigen::Index>(m);
  const auto nn = static_cast<Eigen::Index>(n);
  return {Matrix::Zero(mm, nn), Matrix::Zero(mm, nn)};
}

double tau_constraint_violation(const Matrix& tau, const Vector& omega) {
  if (tau.rows() != omega.size()) throw InputError("tau rows do not match omega");
  return (omega.transpose() * tau).cwiseAbs().maxCoeff();
}

double DualRadii::l2_lambda() const { return std::sqrt(static_cast<double>(n)) * r_lambda; }
double DualRadii::l2_tau() const { return std::sqrt(static_cast<double>(n)) * r_tau; }

double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  if (v.size() == 0) return -std::numeric_limits<double>::infinity();
  const double hi = v.maxCoeff();
  if (!std::isfinite(hi)) return hi;
  return hi + std::log((v.array() - hi).exp().sum());
}

DualObjective::DualObjective(const BarycenterProblem& problem, double eta)
    : problem_(&problem), eta_(eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be positive and finite");
  scaled_costs_.reserve(problem.m());
  scaled_costs_t_.reserve(problem.m());
  for (const auto& c : problem.costs()) {
    scaled_costs_.push_back(-c / eta);
    scaled_costs_t_.push_back(-c.transpose() / eta);
  }
}

Matrix DualObjective::log_row_marginals(const DualState& state) const {
  check_state(state, m(), n());
  const auto nn = static_cast<Eigen::Index>(n());
  Matrix out(state.lambda.rows(), nn);
  Vector tau_k(nn);
  for (std::size_t k = 0; k < m(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    tau_k = state.tau.row(kk).transpose();
    const Matrix& st = scaled_costs_t_[k];
    for (Eigen::Index i = 0; i < nn; ++i)
      out(kk, i) = state.lambda(kk, i) + lse_of_sum(st.col(i).data(), tau_k.data(), nn);
  }
  return out;
}

Matrix DualObjective::log_col_marginals(const DualState& state) const {
  check_state(state, m(), n());
  const auto nn = static_cast<Eigen::Index>(n());
  Matrix out(state.lambda.rows(), nn);
  Vector lambda_k(nn);
  for (std::size_t k = 0; k < m(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    lambda_k = state.lambda.row(kk).transpose();
    const Matrix& s = scaled_costs_[k];
    for (Eigen::Index j = 0; j < nn; ++j)
      out(kk, j) = state.tau(kk, j) + lse_of_sum(s.col(j).data(), lambda_k.data(), nn);
  }
  return out;
}

LogMarginals DualObjective::log_marginals(const DualState& state) const {
  return {log_row_marginals(state), log_col_marginals(state)};
}

Matrix DualObjective::log_B(std::size_t k, const DualState& state) const {
  check_state(state, m(), n());
  const auto kk = static_cast<Eigen::Index>(k);
  Matrix out = scaled_costs_.at(k);
  out.colwise() += state.lambda.row(kk).transpose();
  out.rowwise() += state.tau.row(kk);
  return out;
}

double DualObjective::phi_from_log_rows(const DualState& state, const Matrix& log_rows) const {
  double total = 0.0;
  for (std::size_t k = 0; k < m(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double mass = log_rows.row(kk).array().exp().sum();
    const double linear = state.lambda.row(kk).dot(problem_->weights().row(kk));
    total += problem_->omega(k) * (mass - linear);
  }
  return total;
}

double DualObjective::phi(const DualState& state) const {
  return phi_from_log_rows(state, log_row_marginals(state));
}

std::pair<Matrix, Matrix> DualObjective::gradient(const DualState& state) const {
  const LogMarginals lm = log_marginals(state);
  Matrix g_lambda = lm.log_rows.array().exp().matrix() - problem_->weights();
  Matrix g_tau = lm.log_cols.array().exp().matrix();
  for (std::size_t k = 0; k < m(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    g_lambda.row(kk) *= problem_->omega(k);
    g_tau.row(kk) *= problem_->omega(k);
  }
  return {std::move(g_lambda), std::move(g_tau)};
}

Matrix compute_B(const Vector& lambda_k, const Vector& tau_k, const Matrix& cost_k, double eta) {
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  const auto n = cost_k.rows();
  if (cost_k.cols() != n || lambda_k.size() != n || tau_k.size() != n)
    throw InputError("compute_B: dimension mismatch");
  if (!lambda_k.allFinite() || !tau_k.allFinite() || !cost_k.allFinite())
    throw InputError("compute_B: non-finite input");
  Matrix log_b = -cost_k / eta;
  log_b.colwise() += lambda_k;
  log_b.rowwise() += tau_k.transpose();
  if (log_b.maxCoeff() >= kMaxLinearExponent)
    throw InternalError("compute_B: entry overflows the linear domain; use log marginals");
  return log_b.array().exp().matrix();
}

double phi(const DualState& state, const BarycenterProblem& problem, double eta) {
  return DualObjective(problem, eta).phi(state);
}

std::pair<Matrix, Matrix> grad_phi(const DualState& state, const BarycenterProblem& problem,
                                   double eta) {
  return DualObjective(problem, eta).gradient(state);
}

DualRadii dual_radii(const BarycenterProblem& problem, double eta) {
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  const double min_u = problem.min_weight();
  if (!(min_u > 0.0)) throw DomainError("dual radii need strictly positive weights; smooth first");
  const double c = problem.max_cost();
  DualRadii radii;
  radii.n = problem.n();
  radii.r_tau = 4.0 * c / eta;
  radii.r_lambda = 5.0 * c / eta + std::log(static_cast<double>(problem.n())) - std::log(min_u);
  return radii;
}

DualState canonicalize_dual(const DualState& state, const BarycenterProblem& problem) {
  const std::size_t m = problem.m();
  check_state(state, m, problem.n());
  const Vector& omega = problem.omega();

  Vector mid(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const auto row = state.tau.row(static_cast<Eigen::Index>(k));
    mid(static_cast<Eigen::Index>(k)) = 0.5 * (row.maxCoeff() + row.minCoeff());
  }

  DualState out{Matrix::Zero(state.lambda.rows(), state.lambda.cols()),
                Matrix::Zero(state.tau.rows(), state.tau.cols())};
  for (std::size_t t = 0; t < m; ++t) {
    const double wt = omega(static_cast<Eigen::Index>(t));
    if (wt == 0.0) continue;  // contributes nothing to the omega-average
    DualState shifted = state;
    double compensation = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == t) continue;
      const auto kk = static_cast<Eigen::Index>(k);
      shifted.tau.row(kk).array() -= mid(kk);
      shifted.lambda.row(kk).array() += mid(kk);
      compensation += omega(kk) / wt * mid(kk);
    }
    const auto tt = static_cast<Eigen::Index>(t);
    shifted.tau.row(tt).array() += compensation;
    shifted.lambda.row(tt).array() -= compensation;
    out.lambda += wt * shifted.lambda;
    out.tau += wt * shifted.tau;
  }
  return out;
}

Matrix project_onto_P(const Matrix& tau, const Vector& omega) {
  if (tau.rows() != omega.size()) throw InputError("tau rows do not match omega");
  const Eigen::RowVectorXd mean = omega.transpose() * tau;
  Matrix out = tau;
  out.rowwise() -= mean;
  return out;
}

}  // namespace wbp
