#include "wbp/constraint.hpp"

namespace wbp {

ConstraintMatrix::ConstraintMatrix(std::size_t m, std::size_t n) : m_(m), n_(n) {
  if (m < 1 || n < 1) throw InputError("constraint matrix needs m >= 1 and n >= 1");
  const std::size_t nn = n * n;
  cols_.reserve(m * nn);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) cols_.push_back({k, i, j});

  // (-1)^k with k 1-based is -1 for the 0-based even blocks.
  auto sign = [](std::size_t one_based) { return one_based % 2 == 0 ? 1 : -1; };

  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = rows_.size();
      rows_.push_back({RowLabel::Kind::marginal, k, i});
      for (std::size_t j = 0; j < n; ++j) triplets_.push_back({r, column_of(k, i, j), sign(k + 1)});
    }
  }
  for (std::size_t b = 0; b + 1 < m; ++b) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t r = rows_.size();
      rows_.push_back({RowLabel::Kind::coupling, b, j});
      for (std::size_t i = 0; i < n; ++i)
        triplets_.push_back({r, column_of(b, i, j), sign(b + 2)});
      for (std::size_t i = 0; i < n; ++i)
        triplets_.push_back({r, column_of(b + 1, i, j), sign(b + 1)});
    }
  }
}

IntMatrix ConstraintMatrix::dense() const {
  IntMatrix a = IntMatrix::Zero(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
  for (const auto& t : triplets_)
    a(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) = t.value;
  return a;
}

Matrix ConstraintMatrix::dense_real() const { return dense().cast<double>(); }

IntMatrix barycenter_constraint_matrix(std::size_t m, std::size_t n) {
  return ConstraintMatrix(m, n).dense();
}

}  // namespace wbp
