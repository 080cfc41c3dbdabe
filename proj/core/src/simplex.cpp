#include "wbp/simplex.hpp"

#include <cmath>
#include <limits>

namespace wbp {

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class TableauSolver {
 public:
  TableauSolver(Tableau t, std::vector<std::size_t> basis, std::size_t allowed_cols,
                const SimplexOptions& options, std::size_t& pivots)
      : t_(std::move(t)),
        basis_(std::move(basis)),
        allowed_(allowed_cols),
        opt_(options),
        pivots_(pivots) {}

  Tableau& tableau() { return t_; }
  std::vector<std::size_t>& basis() { return basis_; }

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index rhs() const { return t_.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index j) {
    t_.row(r) /= t_(r, j);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, j);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = static_cast<std::size_t>(j);
    if (++pivots_ > opt_.max_pivots) throw SolverError("simplex: pivot limit exceeded");
  }

  // Runs to optimality over columns [0, allowed_).
  void optimize() {
    std::size_t degenerate_run = 0;
    bool bland = false;
    const Eigen::Index obj = rows();
    for (;;) {
      Eigen::Index enter = -1;
      double best = -opt_.pivot_tol;
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(allowed_); ++j) {
        const double d = t_(obj, j);
        if (bland) {
          if (d < -opt_.pivot_tol) {
            enter = j;
            break;
          }
        } else if (d < best) {
          best = d;
          enter = j;
        }
      }
      if (enter < 0) return;

      Eigen::Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < obj; ++r) {
        const double a = t_(r, enter);
        if (a <= opt_.pivot_tol) continue;
        const double q = std::max(0.0, t_(r, rhs())) / a;
        const bool tie = leave >= 0 && std::abs(q - ratio) <= 1e-12 * std::max(1.0, ratio);
        if (q < ratio && !tie) {
          ratio = q;
          leave = r;
        } else if (tie && basis_[static_cast<std::size_t>(r)] <
                              basis_[static_cast<std::size_t>(leave)]) {
          leave = r;
        }
      }
      if (leave < 0) throw SolverError("simplex: problem is unbounded");

      if (ratio <= opt_.pivot_tol) {
        if (++degenerate_run >= opt_.degenerate_switch) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      pivot(leave, enter);
    }
  }

 private:
  Tableau t_;
  std::vector<std::size_t> basis_;
  std::size_t allowed_;
  const SimplexOptions& opt_;
  std::size_t& pivots_;
};

}  // namespace

SimplexResult simplex_solve(const Matrix& A, const Vector& b, const Vector& c,
                            const SimplexOptions& options) {
  const Eigen::Index rows = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != rows || c.size() != n) throw InputError("simplex: dimension mismatch");
  if (!A.allFinite() || !b.allFinite() || !c.allFinite())
    throw InputError("simplex: non-finite data");

  // Rows with negative right-hand side are negated so the artificial basis is feasible.
  Matrix a = A;
  Vector rhs = b;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (rhs(r) < 0.0) {
      a.row(r) *= -1.0;
      rhs(r) = -rhs(r);
    }
  }

  // Phase one over [A | I | rhs] with the artificial objective in the last row.
  Tableau t = Tableau::Zero(rows + 1, n + rows + 1);
  t.topLeftCorner(rows, n) = a;
  t.block(0, n, rows, rows).setIdentity();
  t.topRightCorner(rows, 1) = rhs;
  t.bottomLeftCorner(1, n) = -a.colwise().sum();
  t(rows, n + rows) = -rhs.sum();
  std::vector<std::size_t> basis(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) basis[static_cast<std::size_t>(r)] = static_cast<std::size_t>(n + r);

  SimplexResult result;
  TableauSolver phase1(std::move(t), std::move(basis), static_cast<std::size_t>(n), options,
                       result.pivots);
  phase1.optimize();
  Tableau& tab = phase1.tableau();
  const double infeasibility = -tab(rows, n + rows);
  if (infeasibility > 1e-9 * std::max(1.0, rhs.lpNorm<1>()))
    throw SolverError("simplex: problem is infeasible");

  // Pivot remaining artificials out; a row with no usable entry is redundant.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (phase1.basis()[static_cast<std::size_t>(r)] < static_cast<std::size_t>(n)) {
      keep.push_back(r);
      continue;
    }
    Eigen::Index best = -1;
    double mag = options.pivot_tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(tab(r, j)) > mag) {
        mag = std::abs(tab(r, j));
        best = j;
      }
    }
    if (best >= 0) {
      phase1.pivot(r, best);
      keep.push_back(r);
    }
  }

  const auto kept = static_cast<Eigen::Index>(keep.size());
  Tableau t2 = Tableau::Zero(kept + 1, n + 1);
  std::vector<std::size_t> basis2;
  basis2.reserve(keep.size());
  for (Eigen::Index q = 0; q < kept; ++q) {
    const Eigen::Index r = keep[static_cast<std::size_t>(q)];
    t2.row(q).head(n) = tab.row(r).head(n);
    t2(q, n) = tab(r, n + rows);
    basis2.push_back(phase1.basis()[static_cast<std::size_t>(r)]);
  }
  // Reduced costs d = c - c_B^T T.
  t2.row(kept).head(n) = c.transpose();
  for (Eigen::Index q = 0; q < kept; ++q) {
    const double cb = c(static_cast<Eigen::Index>(basis2[static_cast<std::size_t>(q)]));
    if (cb != 0.0) t2.row(kept) -= cb * t2.row(q);
  }

  TableauSolver phase2(std::move(t2), std::move(basis2), static_cast<std::size_t>(n), options,
                       result.pivots);
  phase2.optimize();

  // Recompute the basic solution from the original rows for accuracy.
  const auto& final_basis = phase2.basis();
  Matrix ab(kept, kept);
  Vector bb(kept);
  for (Eigen::Index q = 0; q < kept; ++q) {
    const Eigen::Index r = keep[static_cast<std::size_t>(q)];
    bb(q) = rhs(r);
    for (Eigen::Index p = 0; p < kept; ++p)
      ab(q, p) = a(r, static_cast<Eigen::Index>(final_basis[static_cast<std::size_t>(p)]));
  }
  Eigen::FullPivLU<Matrix> lu(ab);
  Vector xb;
  if (kept > 0 && lu.isInvertible()) {
    xb = lu.solve(bb);
  } else {
    xb = phase2.tableau().col(n).head(kept);
  }

  result.x = Vector::Zero(n);
  for (Eigen::Index q = 0; q < kept; ++q) {
    const double v = xb(q);
    if (v < -1e-9) throw SolverError("simplex: basic solution lost feasibility beyond tolerance");
    result.x(static_cast<Eigen::Index>(final_basis[static_cast<std::size_t>(q)])) = std::max(0.0, v);
  }
  result.value = c.dot(result.x);
  result.basis = final_basis;
  return result;
}

}  // namespace wbp
