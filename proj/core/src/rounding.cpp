#include "wbp/rounding.hpp"

#include <algorithm>
#include <cmath>

namespace wbp {

namespace {

constexpr double kColumnAgreementTol = 1e-8;
constexpr double kRepairTol = 1e-14;

}  // namespace

PlanStack round_plans(std::span<const Matrix> B, const Matrix& targets, const Vector& omega) {
  const auto m = static_cast<Eigen::Index>(B.size());
  if (m == 0) throw InputError("round_plans: empty stack");
  if (targets.rows() != m || omega.size() != m)
    throw InputError("round_plans: stack, targets and omega disagree on m");
  const Eigen::Index n = targets.cols();
  for (const auto& b : B) {
    if (b.rows() != n || b.cols() != n) throw InputError("round_plans: plan is not n x n");
    if (!b.allFinite() || !(b.minCoeff() >= 0.0))
      throw InputError("round_plans: entries must be nonnegative and finite");
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto u = targets.row(k);
    if (!u.allFinite() || u.minCoeff() < 0.0 || std::abs(u.sum() - 1.0) > kSimplexTol)
      throw InputError("round_plans: target " + std::to_string(k) + " is not a probability vector");
  }
  const Vector l0 = col_sums(B[0]);
  for (const auto& b : B) {
    if ((col_sums(b) - l0).cwiseAbs().maxCoeff() > kColumnAgreementTol * std::max(1.0, l0.maxCoeff()))
      throw InputError("round_plans: column marginals of the stack do not agree");
  }

  std::vector<Matrix> F;
  F.reserve(B.size());
  Vector q = Vector::Zero(n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Matrix& b = B[static_cast<std::size_t>(k)];
    const Vector r = row_sums(b);
    Vector scale(n);
    for (Eigen::Index i = 0; i < n; ++i) scale(i) = r(i) > 0.0 ? std::min(1.0, targets(k, i) / r(i)) : 1.0;
    F.push_back(scale.asDiagonal() * b);
    q += omega(k) * col_sums(F.back());
  }
  Vector u_hat = q.array() + (1.0 - q.sum()) / static_cast<double>(n);

  PlanStack out;
  out.plans.reserve(B.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    Matrix& g = F[static_cast<std::size_t>(k)];
    const Vector l = col_sums(g);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (l(j) > 0.0) g.col(j) *= std::min(1.0, u_hat(j) / l(j));
    }
    // Both residuals are nonnegative in exact arithmetic; clamp rounding noise.
    const Vector a = (targets.row(k).transpose() - row_sums(g)).cwiseMax(0.0);
    const Vector c = (u_hat - col_sums(g)).cwiseMax(0.0);
    const double mass = a.lpNorm<1>();
    if (mass > 0.0) {
      g.noalias() += a * c.transpose() / mass;
    } else if (c.lpNorm<1>() > kRepairTol) {
      throw InternalError("round_plans: row residual vanished but column residual did not");
    }
    out.plans.push_back(std::move(g));
  }
  out.barycenter = std::move(u_hat);
  return out;
}

}  // namespace wbp
