#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "wbp/core.hpp"

namespace wbp {

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  int value = 0;
};

/// Which equality a row of the barycenter constraint matrix encodes.
struct RowLabel {
  enum class Kind { marginal, coupling };
  Kind kind = Kind::marginal;
  /// 0-based: the measure k for marginal rows, the pair (block, block + 1) for coupling rows.
  std::size_t block = 0;
  /// Row index i of r(X_k) for marginal rows, column index j of l(X_b) - l(X_{b+1}) otherwise.
  std::size_t index = 0;
};

/// Variable (k, i, j), i.e. entry (i, j) of X_k; plans are vectorized row-major.
struct ColumnLabel {
  std::size_t block = 0;
  std::size_t i = 0;
  std::size_t j = 0;
};

/// The {-1, 0, 1} equality matrix of the barycenter LP over vec(X_1), ..., vec(X_m).
///
/// The first m n rows are the signed marginal blocks (-1)^k E on X_k (k 1-based), the last
/// (m - 1) n rows the coupling blocks (-1)^{b+1} G on X_b and (-1)^b G on X_{b+1}, where E sums
/// rows of a plan and G sums its columns.
class ConstraintMatrix {
 public:
  ConstraintMatrix(std::size_t m, std::size_t n);

  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }
  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_.size(); }

  const std::vector<Triplet>& triplets() const { return triplets_; }
  const RowLabel& row_label(std::size_t r) const { return rows_.at(r); }
  const ColumnLabel& column_label(std::size_t c) const { return cols_.at(c); }

  /// Index of the variable (k, i, j).
  std::size_t column_of(std::size_t k, std::size_t i, std::size_t j) const {
    return k * n_ * n_ + i * n_ + j;
  }

  IntMatrix dense() const;
  Matrix dense_real() const;

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<Triplet> triplets_;
  std::vector<RowLabel> rows_;
  std::vector<ColumnLabel> cols_;
};

/// Shorthand for ConstraintMatrix(m, n).dense().
IntMatrix barycenter_constraint_matrix(std::size_t m, std::size_t n);

}  // namespace wbp
