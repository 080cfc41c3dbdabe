#include <cmath>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "wbp/ibp.hpp"
#include "wbp/rounding.hpp"

using namespace wbp;
using wbp::testing::Draw;
using wbp::testing::make_problem;
using wbp::testing::random_dual;
using wbp::testing::random_problem;

namespace {

Matrix rows_of(const DualState& s, const BarycenterProblem& p, double eta) {
  Matrix r(static_cast<Eigen::Index>(p.m()), static_cast<Eigen::Index>(p.n()));
  for (std::size_t k = 0; k < p.m(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    r.row(kk) = row_sums(compute_B(s.lambda.row(kk).transpose(), s.tau.row(kk).transpose(), p.cost(k), eta))
                    .transpose();
  }
  return r;
}

Matrix cols_of(const DualState& s, const BarycenterProblem& p, double eta) {
  Matrix l(static_cast<Eigen::Index>(p.m()), static_cast<Eigen::Index>(p.n()));
  for (std::size_t k = 0; k < p.m(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    l.row(kk) = col_sums(compute_B(s.lambda.row(kk).transpose(), s.tau.row(kk).transpose(), p.cost(k), eta))
                    .transpose();
  }
  return l;
}

}  // namespace

TEST(IbpRowUpdate, ZeroCostUniform) {
  Matrix w(1, 2);
  w << 0.5, 0.5;
  const auto p = make_problem(w, Vector::Ones(1), Matrix::Zero(2, 2));
  const DualState s = ibp_row_update(DualState::zeros(1, 2), p, 1.0);
  EXPECT_NEAR((s.lambda.array() + 2.0 * std::log(2.0)).abs().maxCoeff(), 0.0, 1e-15);
}

TEST(IbpRowUpdate, FixedPointAndResidue) {
  const auto p = random_problem(3, 5, 31);
  Draw d(7);
  const double eta = 0.3;
  const DualState once = ibp_row_update(random_dual(3, 5, p.omega(), d), p, eta);
  EXPECT_LE(residue_from_rows(p, rows_of(once, p, eta)), 1e-12);
  const DualState twice = ibp_row_update(once, p, eta);
  EXPECT_LE((twice.lambda - once.lambda).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(twice.tau, once.tau);
}

TEST(IbpRowUpdate, RejectsZeroWeight) {
  Matrix w(1, 2);
  w << 1.0, 0.0;
  const auto p = make_problem(w, Vector::Ones(1), Matrix::Zero(2, 2));
  EXPECT_THROW(ibp_row_update(DualState::zeros(1, 2), p, 1.0), DomainError);
}

TEST(IbpColUpdate, GeometricMean) {
  Matrix w(2, 2);
  w << 0.5, 0.5, 0.5, 0.5;
  Vector omega(2);
  omega << 0.5, 0.5;
  const auto p = make_problem(w, omega, Matrix::Zero(2, 2));
  DualState s = DualState::zeros(2, 2);
  // l(B_1) = (1, 1) and l(B_2) = (4, 4)
  s.lambda.row(0).setConstant(std::log(0.5));
  s.lambda.row(1).setConstant(std::log(2.0));
  const DualState out = ibp_col_update(s, p, 1.0);
  const Matrix l = cols_of(out, p, 1.0);
  EXPECT_NEAR((l - Matrix::Constant(2, 2, 2.0)).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  EXPECT_LE(tau_constraint_violation(out.tau, omega), 1e-15);
}

TEST(IbpColUpdate, FixedPoints) {
  const auto p1 = random_problem(1, 4, 32);
  Draw d(8);
  const DualState single = random_dual(1, 4, p1.omega(), d);
  EXPECT_LE((ibp_col_update(single, p1, 0.5).tau - single.tau).cwiseAbs().maxCoeff(), 1e-14);

  // identical blocks share column marginals
  const auto p = random_problem(3, 4, 33);
  DualState same = DualState::zeros(3, 4);
  const Vector lam = d.matrix(4, 1, -1, 1);
  for (Eigen::Index k = 0; k < 3; ++k) same.lambda.row(k) = lam.transpose();
  EXPECT_LE((ibp_col_update(same, p, 0.5).tau - same.tau).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(IbpColUpdate, EqualisesColumns) {
  const auto p = random_problem(4, 5, 34);
  Draw d(9);
  const DualState out = ibp_col_update(random_dual(4, 5, p.omega(), d), p, 0.4);
  const Matrix l = cols_of(out, p, 0.4);
  for (Eigen::Index k = 1; k < 4; ++k) EXPECT_LE((l.row(k) - l.row(0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IbpSolve, IdenticalMeasuresZeroCost) {
  Draw d(10);
  const Vector u = d.simplex(4, 0.1);
  Matrix w(2, 4);
  w.row(0) = u.transpose();
  w.row(1) = u.transpose();
  Vector omega(2);
  omega << 0.3, 0.7;
  const Matrix c = Matrix::Ones(4, 4) - Matrix::Identity(4, 4);
  const auto p = make_problem(w, omega, c);
  const SolveResult r = ibp_solve(p, 0.02, 1e-10);
  const PlanStack rounded = round_plans(r.plans.plans, p.weights(), p.omega());
  EXPECT_LE(primal_objective(p, rounded.plans), 1e-6);
}

TEST(IbpSolve, SinglePoint) {
  const auto p = make_problem(Matrix::Ones(2, 1), Vector::Constant(2, 0.5), Matrix::Zero(1, 1));
  const SolveResult r = ibp_solve(p, 1.0, 1e-12);
  EXPECT_EQ(r.report.iterations, 0u);
  EXPECT_EQ(r.report.residue_history.front().iteration, 0u);
  EXPECT_NEAR(r.report.final_residue(), 0.0, 1e-15);
  EXPECT_NEAR(r.plans.plans[0](0, 0), 1.0, 1e-15);
}

TEST(IbpSolve, DualObjectiveNonIncreasing) {
  const auto p = random_problem(3, 5, 35);
  SolverOptions o;
  o.check_every = 1;
  const SolveResult r = ibp_solve(p, 0.05, 1e-9, o);
  const auto& h = r.report.objective_history;
  ASSERT_GT(h.size(), 2u);
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i].value, h[i - 1].value + 1e-12 * std::abs(h[i - 1].value));
  EXPECT_LE(r.report.final_residue(), 1e-9);
  EXPECT_LE(tau_constraint_violation(r.dual.tau, p.omega()), kDualFeasibilityTol);
}

TEST(IbpSolve, ResidueCadence) {
  const auto p = random_problem(3, 4, 36);
  const SolveResult r = ibp_solve(p, 0.1, 1e-8);
  for (const HistoryPoint& h : r.report.residue_history) EXPECT_EQ(h.iteration % 10, 0u);
  EXPECT_EQ(r.report.residue_history.back().iteration, r.report.iterations);
  EXPECT_EQ(r.report.residue_history.size(), r.report.objective_history.size());
}

TEST(IbpSolve, IterationCap) {
  const auto p = random_problem(3, 4, 37);
  SolverOptions o;
  o.max_iterations = 20;
  try {
    ibp_solve(p, 0.01, 1e-14, o);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.report().iterations, 20u);
    EXPECT_EQ(e.state().tau.rows(), 3);
  }
}

TEST(IbpSolve, SmallEtaStaysFinite) {
  const auto p = random_problem(3, 6, 38);
  const SolveResult r = ibp_solve(p, 2e-3, 1e-3);
  EXPECT_LE(r.report.final_residue(), 1e-3);
  for (const Matrix& b : r.plans.plans) EXPECT_TRUE(b.allFinite());
}
