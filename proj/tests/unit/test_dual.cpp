#include <cmath>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "wbp/dual.hpp"
#include "wbp/ibp.hpp"

using namespace wbp;
using wbp::testing::Draw;
using wbp::testing::make_problem;
using wbp::testing::random_dual;
using wbp::testing::random_problem;

namespace {

Matrix swap2() {
  Matrix c(2, 2);
  c << 0, 1, 1, 0;
  return c;
}

// phi written out with explicit exponentials, independent of the log-sum-exp path
double naive_phi(const DualState& s, const BarycenterProblem& p, double eta) {
  double total = 0.0;
  for (std::size_t k = 0; k < p.m(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    double mass = 0.0;
    for (Eigen::Index i = 0; i < s.lambda.cols(); ++i)
      for (Eigen::Index j = 0; j < s.tau.cols(); ++j)
        mass += std::exp(s.lambda(kk, i) + s.tau(kk, j) - p.cost(k)(i, j) / eta);
    total += p.omega(k) * (mass - s.lambda.row(kk).dot(p.weights().row(kk)));
  }
  return total;
}

}  // namespace

TEST(ComputeB, Examples) {
  EXPECT_TRUE(compute_B(Vector::Zero(3), Vector::Zero(3), Matrix::Zero(3, 3), 1.0).isApprox(Matrix::Ones(3, 3)));
  const Matrix b2 = compute_B(Vector::Constant(2, std::log(2.0)), Vector::Zero(2), Matrix::Zero(2, 2), 1.0);
  EXPECT_NEAR((b2 - 2.0 * Matrix::Ones(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  Matrix expected(2, 2);
  expected << 1, std::exp(-1.0), std::exp(-1.0), 1;
  EXPECT_NEAR((compute_B(Vector::Zero(2), Vector::Zero(2), swap2(), 1.0) - expected).cwiseAbs().maxCoeff(), 0.0,
              1e-16);
}

TEST(ComputeB, OverflowIsReported) {
  EXPECT_THROW(compute_B(Vector::Constant(2, 800.0), Vector::Zero(2), Matrix::Zero(2, 2), 1.0), InternalError);
}

TEST(Phi, AllZero) {
  Matrix w(1, 3);
  w << 0.2, 0.3, 0.5;
  const auto p = make_problem(w, Vector::Ones(1), Matrix::Zero(3, 3));
  EXPECT_DOUBLE_EQ(phi(DualState::zeros(1, 3), p, 1.0), 9.0);
}

TEST(Phi, LogWeights) {
  Matrix w(1, 3);
  w << 0.2, 0.3, 0.5;
  const auto p = make_problem(w, Vector::Ones(1), Matrix::Zero(3, 3));
  DualState s = DualState::zeros(1, 3);
  s.lambda = w.array().log().matrix();
  const Vector u = w.row(0).transpose();
  EXPECT_NEAR(phi(s, p, 1.0), 3.0 - u.dot(u.array().log().matrix()), 1e-14);
}

TEST(Phi, MatchesNaiveEvaluation) {
  const auto p = random_problem(3, 5, 11);
  Draw d(1);
  for (int trial = 0; trial < 20; ++trial) {
    const DualState s = random_dual(3, 5, p.omega(), d, 2.0);
    EXPECT_NEAR(phi(s, p, 0.3), naive_phi(s, p, 0.3), 1e-12 * std::abs(naive_phi(s, p, 0.3)));
  }
}

TEST(Phi, MidpointConvexity) {
  const auto p = random_problem(3, 4, 12);
  Draw d(2);
  for (int trial = 0; trial < 200; ++trial) {
    const DualState a = random_dual(3, 4, p.omega(), d, 3.0);
    const DualState b = random_dual(3, 4, p.omega(), d, 3.0);
    const DualState mid{0.5 * (a.lambda + b.lambda), 0.5 * (a.tau + b.tau)};
    const double lhs = phi(mid, p, 0.5);
    const double rhs = 0.5 * phi(a, p, 0.5) + 0.5 * phi(b, p, 0.5);
    EXPECT_LE(lhs, rhs + 1e-12 * std::abs(rhs));
  }
}

TEST(Phi, StableAtSmallEta) {
  const auto p = random_problem(2, 6, 13);
  DualState s = DualState::zeros(2, 6);
  s.lambda.setConstant(400.0);
  const DualObjective obj(p, 1e-3);
  EXPECT_TRUE(std::isfinite(obj.log_row_marginals(s).sum()));
}

TEST(Gradient, UniformExample) {
  Matrix w(1, 2);
  w << 0.5, 0.5;
  const auto p = make_problem(w, Vector::Ones(1), Matrix::Zero(2, 2));
  const auto [gl, gt] = grad_phi(DualState::zeros(1, 2), p, 1.0);
  EXPECT_NEAR((gl - Matrix::Constant(1, 2, 1.5)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  EXPECT_NEAR((gt - Matrix::Constant(1, 2, 2.0)).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Gradient, CentralDifferences) {
  const auto p = random_problem(3, 4, 14);
  const double eta = 0.4, h = 1e-6;
  Draw d(3);
  for (int trial = 0; trial < 10; ++trial) {
    const DualState s = random_dual(3, 4, p.omega(), d, 1.0);
    const auto [gl, gt] = grad_phi(s, p, eta);
    for (int block = 0; block < 2; ++block) {
      for (Eigen::Index k = 0; k < 3; ++k) {
        for (Eigen::Index i = 0; i < 4; ++i) {
          DualState plus = s, minus = s;
          (block == 0 ? plus.lambda : plus.tau)(k, i) += h;
          (block == 0 ? minus.lambda : minus.tau)(k, i) -= h;
          const double fd = (naive_phi(plus, p, eta) - naive_phi(minus, p, eta)) / (2 * h);
          const double g = block == 0 ? gl(k, i) : gt(k, i);
          EXPECT_LE(std::abs(g - fd) / std::max(1.0, std::abs(g)), 1e-6);
        }
      }
    }
  }
}

TEST(Gradient, LambdaBlockVanishesAtOptimum) {
  const auto p = random_problem(3, 5, 15);
  const double eta = 0.2;
  const SolveResult r = ibp_solve(p, eta, 1e-11);
  const auto [gl, gt] = grad_phi(r.dual, p, eta);
  EXPECT_LE(gl.cwiseAbs().maxCoeff(), 1e-10);
  // tau-block gradient lies in the normal cone of P: every omega_k l_k / omega_k agrees
  Matrix cols = gt;
  for (Eigen::Index k = 0; k < 3; ++k) cols.row(k) /= p.omega(static_cast<std::size_t>(k));
  EXPECT_LE((cols.row(0) - cols.row(2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DualRadiiTest, Examples) {
  Matrix w = Matrix::Constant(1, 10, 0.1);
  Matrix c = Matrix::Ones(10, 10) - Matrix::Identity(10, 10);
  const auto p = make_problem(w, Vector::Ones(1), c);
  const DualRadii r = dual_radii(p, 0.5);
  EXPECT_DOUBLE_EQ(r.r_tau, 8.0);
  EXPECT_NEAR(r.r_lambda, 10.0 + std::log(10.0) - std::log(0.1), 1e-13);
  EXPECT_NEAR(r.r_lambda, 14.6052, 1e-4);
  EXPECT_NEAR(r.l2_lambda(), std::sqrt(10.0) * r.r_lambda, 1e-12);
  EXPECT_NEAR(r.l2_tau(), std::sqrt(10.0) * 8.0, 1e-12);
}

TEST(Canonicalize, CanonicalStateUnchanged) {
  // m = 2 with tau_2 = -(omega_1 / omega_2) tau_1 and tau_1 centred: no shift applies
  const auto p = random_problem(2, 4, 16);
  Draw d(4);
  DualState s = random_dual(2, 4, p.omega(), d);
  s.tau.row(0).array() -= 0.5 * (s.tau.row(0).maxCoeff() + s.tau.row(0).minCoeff());
  s.tau.row(1) = -(p.omega(0) / p.omega(1)) * s.tau.row(0);
  const DualState c = canonicalize_dual(s, p);
  EXPECT_LE((c.lambda - s.lambda).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((c.tau - s.tau).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Canonicalize, ShiftInvariance) {
  const auto p = random_problem(3, 4, 17);
  Draw d(5);
  const DualState s = random_dual(3, 4, p.omega(), d);
  const double eta = 0.5;
  const DualState c = canonicalize_dual(s, p);
  EXPECT_NEAR(phi(c, p, eta), phi(s, p, eta), 1e-12);
  EXPECT_LE(tau_constraint_violation(c.tau, p.omega()), 1e-12);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Matrix b0 = compute_B(s.lambda.row(kk).transpose(), s.tau.row(kk).transpose(), p.cost(k), eta);
    const Matrix b1 = compute_B(c.lambda.row(kk).transpose(), c.tau.row(kk).transpose(), p.cost(k), eta);
    EXPECT_LE((b0 - b1).cwiseAbs().maxCoeff(), 1e-12 * b0.maxCoeff());
  }
}

TEST(Canonicalize, OptimumObeysRadii) {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const auto p = random_problem(3, 5, seed);
    const double eta = 0.25;
    const SolveResult r = ibp_solve(p, eta, 1e-10);
    const DualState c = canonicalize_dual(r.dual, p);
    const DualRadii radii = dual_radii(p, eta);
    EXPECT_LE(c.tau.cwiseAbs().maxCoeff(), radii.r_tau);
    EXPECT_LE(c.lambda.cwiseAbs().maxCoeff(), radii.r_lambda);
  }
}

TEST(ProjectOntoP, Examples) {
  const auto p = random_problem(4, 3, 18);
  Draw d(6);
  const Matrix feasible = project_onto_P(d.matrix(4, 3, -1, 1), p.omega());
  EXPECT_LE((project_onto_P(feasible, p.omega()) - feasible).cwiseAbs().maxCoeff(), 1e-15);
  Matrix constant(4, 3);
  for (Eigen::Index k = 0; k < 4; ++k) constant.row(k).setConstant(0.7);
  EXPECT_LE(project_onto_P(constant, p.omega()).cwiseAbs().maxCoeff(), 1e-15);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix t = project_onto_P(d.matrix(4, 3, -10, 10), p.omega());
    EXPECT_LE(tau_constraint_violation(t, p.omega()), 1e-14);
  }
}

TEST(LogSumExp, Stable) {
  Vector v(3);
  v << 1000.0, 1000.0, -5.0;
  EXPECT_NEAR(log_sum_exp(v), 1000.0 + std::log(2.0), 1e-12);
  v.setConstant(-std::numeric_limits<double>::infinity());
  EXPECT_EQ(log_sum_exp(v), -std::numeric_limits<double>::infinity());
}
