#include <cmath>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "wbp/constraint.hpp"
#include "wbp/tu.hpp"

using namespace wbp;
using wbp::testing::Draw;

namespace {

IntMatrix printed_witness() {
  IntMatrix r(7, 7);
  r << -1, -1, 0, 0, 0, 0, 0,
       0, 0, 1, 1, 0, 0, 0,
       0, 0, 0, 0, 0, -1, -1,
       1, 0, 0, 0, -1, 0, 0,
       0, 1, -1, 0, 0, 0, 0,
       0, 0, 0, 0, -1, 1, 0,
       0, 0, 0, -1, 0, 0, 1;
  return r;
}

IntMatrix random_ternary(std::size_t rows, std::size_t cols, Draw& d, double density = 0.5) {
  IntMatrix m = IntMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (d.uniform() < density) m(i, j) = d.uniform() < 0.5 ? -1 : 1;
  return m;
}

IntMatrix random_incidence(std::size_t nodes, std::size_t arcs, Draw& d) {
  IntMatrix m = IntMatrix::Zero(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(arcs));
  for (Eigen::Index e = 0; e < m.cols(); ++e) {
    const auto t = static_cast<Eigen::Index>(d.below(nodes));
    auto h = static_cast<Eigen::Index>(d.below(nodes - 1));
    if (h >= t) ++h;
    m(t, e) = 1;
    m(h, e) = -1;
  }
  return m;
}

// Every square submatrix through one Bareiss elimination each.
bool naive_tu(const IntMatrix& M) {
  const auto r = static_cast<int>(M.rows()), c = static_cast<int>(M.cols());
  for (int rmask = 1; rmask < (1 << r); ++rmask) {
    const int k = __builtin_popcount(static_cast<unsigned>(rmask));
    if (k > c) continue;
    for (int cmask = 1; cmask < (1 << c); ++cmask) {
      if (__builtin_popcount(static_cast<unsigned>(cmask)) != k) continue;
      IntMatrix sub(k, k);
      int a = 0;
      for (int i = 0; i < r; ++i) {
        if (!(rmask >> i & 1)) continue;
        int b = 0;
        for (int j = 0; j < c; ++j)
          if (cmask >> j & 1) sub(a, b++) = M(i, j);
        ++a;
      }
      if (std::abs(bareiss_determinant(sub)) > 1) return false;
    }
  }
  return true;
}

IntMatrix take(const IntMatrix& M, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  IntMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          M(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
  return out;
}

}  // namespace

TEST(Bareiss, MatchesFloatingDeterminant) {
  Draw d(201);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + d.below(7);
    IntMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = static_cast<int>(d.below(7)) - 3;
    EXPECT_EQ(bareiss_determinant(m), std::llround(m.cast<double>().determinant()));
  }
  IntMatrix z = IntMatrix::Zero(3, 3);
  EXPECT_EQ(bareiss_determinant(z), 0);
}

TEST(BruteForceTu, Examples) {
  EXPECT_TRUE(is_tu_bruteforce(IntMatrix::Identity(6, 6)).totally_unimodular);
  IntMatrix m(2, 2);
  m << 1, 1, -1, 1;
  const TuVerdict v = is_tu_bruteforce(m);
  EXPECT_FALSE(v.totally_unimodular);
  EXPECT_EQ(std::abs(v.determinant), 2);
  EXPECT_EQ(v.rows.size(), 2u);
  IntMatrix bad(1, 1);
  bad << 2;
  EXPECT_THROW(is_tu_bruteforce(bad), InputError);
}

TEST(BruteForceTu, DirectedGraphsAreTu) {
  Draw d(202);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nodes = 2 + d.below(5);
    const IntMatrix inc = random_incidence(nodes, 2 + d.below(8), d);
    const TuVerdict v = is_tu_bruteforce(inc);
    EXPECT_TRUE(v.totally_unimodular);
    EXPECT_EQ(v.checked_order, static_cast<std::size_t>(std::min(inc.rows(), inc.cols())));
  }
}

TEST(BruteForceTu, AgreesWithNaiveEnumeration) {
  Draw d(203);
  int refuted = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const IntMatrix m = random_ternary(2 + d.below(4), 2 + d.below(5), d, d.uniform(0.2, 0.6));
    const TuVerdict v = is_tu_bruteforce(m);
    EXPECT_EQ(v.totally_unimodular, naive_tu(m));
    if (!v.totally_unimodular) {
      ++refuted;
      EXPECT_EQ(bareiss_determinant(take(m, v.rows, v.cols)), v.determinant);
      EXPECT_GE(std::abs(v.determinant), 2);
    }
  }
  EXPECT_GT(refuted, 10);
}

TEST(BruteForceTu, OrderLimit) {
  IntMatrix m(3, 3);
  m << 1, 1, 0, 0, 1, 1, 1, 0, 1;  // det 2 only at order 3
  EXPECT_TRUE(is_tu_bruteforce(m, 2).totally_unimodular);
  EXPECT_FALSE(is_tu_bruteforce(m).totally_unimodular);
}

TEST(GhouilaHouri, SubsetExamples) {
  Draw d(204);
  const IntMatrix inc = random_incidence(5, 7, d);
  std::vector<std::size_t> all = {0, 1, 2, 3, 4};
  const auto part = ghouila_houri_subset_check(inc, all);
  ASSERT_TRUE(part);
  EXPECT_EQ(part->first.size() + part->second.size(), 5u);

  const IntMatrix A = barycenter_constraint_matrix(3, 3);
  EXPECT_FALSE(ghouila_houri_subset_check(A, {0, 3, 6, 9, 10, 12, 14}));

  const auto empty = ghouila_houri_subset_check(A, {});
  ASSERT_TRUE(empty);
  EXPECT_TRUE(empty->first.empty() && empty->second.empty());
  EXPECT_THROW(ghouila_houri_subset_check(A, {0, 0}), InputError);
}

TEST(GhouilaHouri, PartitionIsValid) {
  Draw d(205);
  for (int trial = 0; trial < 50; ++trial) {
    const IntMatrix m = random_ternary(6, 6, d, 0.4);
    const std::vector<std::size_t> I = {0, 2, 3, 5};
    if (const auto part = ghouila_houri_subset_check(m, I)) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        int s = 0;
        for (std::size_t r : part->first) s += m(static_cast<Eigen::Index>(r), j);
        for (std::size_t r : part->second) s -= m(static_cast<Eigen::Index>(r), j);
        EXPECT_LE(std::abs(s), 1);
      }
    }
  }
}

TEST(GhouilaHouri, FullCriterionAgreesWithDeterminants) {
  Draw d(206);
  for (int trial = 0; trial < 100; ++trial) {
    const IntMatrix m = random_ternary(2 + d.below(4), 2 + d.below(4), d, d.uniform(0.2, 0.6));
    EXPECT_EQ(is_tu_ghc_full(m).totally_unimodular, naive_tu(m));
  }
  IntMatrix one(1, 1);
  one << 1;
  EXPECT_TRUE(is_tu_ghc_full(one).totally_unimodular);
  EXPECT_THROW(is_tu_ghc_full(IntMatrix::Identity(21, 21)), SizeError);
}

TEST(GhouilaHouri, BarycenterMatrices) {
  const IntMatrix A33 = barycenter_constraint_matrix(3, 3);
  const GhcVerdict v = is_tu_ghc_full(A33);
  EXPECT_FALSE(v.totally_unimodular);
  EXPECT_FALSE(ghouila_houri_subset_check(A33, v.witness_rows));
  const ReducedMatrix r = reduce_rows_n2(barycenter_constraint_matrix(3, 2), 3);
  EXPECT_TRUE(is_tu_ghc_full(r.matrix).totally_unimodular);
}

TEST(Reduction, ShapeAndCertificates) {
  for (std::size_t m = 2; m <= 5; ++m) {
    const IntMatrix A = barycenter_constraint_matrix(m, 2);
    const ReducedMatrix r = reduce_rows_n2(A, m);
    EXPECT_EQ(r.matrix.rows(), static_cast<Eigen::Index>(3 * m - 1));
    EXPECT_EQ(r.matrix.cols(), static_cast<Eigen::Index>(4 * m));
    EXPECT_EQ(r.removed.size(), m - 1);
    EXPECT_EQ(r.kept.size() + r.removed.size(), static_cast<std::size_t>(A.rows()));
    EXPECT_TRUE(verify_reduction_certificates(A, r));
    for (std::size_t i = 0; i < r.removed.size(); ++i) {
      Eigen::RowVectorXi sum = A.row(static_cast<Eigen::Index>(r.removed[i]));
      for (std::size_t s : r.certificates[i]) {
        EXPECT_NE(std::find(r.kept.begin(), r.kept.end(), s), r.kept.end());
        sum += A.row(static_cast<Eigen::Index>(s));
      }
      EXPECT_EQ(sum, Eigen::RowVectorXi::Zero(A.cols()));
    }
    for (Eigen::Index j = 0; j < r.matrix.cols(); ++j) {
      const auto col = r.matrix.col(j);
      EXPECT_LE((col.array() != 0).count(), 2);
      if ((col.array() != 0).count() == 2) EXPECT_EQ(col.sum(), 0);
    }
  }
  EXPECT_THROW(reduce_rows_n2(barycenter_constraint_matrix(3, 3), 3), UnsupportedError);
}

TEST(Reduction, ReducedMatrixIsTu) {
  for (std::size_t m : {3u, 4u}) {
    const ReducedMatrix r = reduce_rows_n2(barycenter_constraint_matrix(m, 2), m);
    EXPECT_TRUE(is_tu_bruteforce(r.matrix).totally_unimodular);
  }
}

TEST(Witness, IndicesAtThreeByThree) {
  EXPECT_EQ(witness_rows(3, 3), (std::vector<std::size_t>{1, 4, 7, 10, 11, 13, 15}));
  EXPECT_EQ(witness_cols(3), (std::vector<std::size_t>{1, 2, 11, 12, 13, 19, 21}));
  for (std::size_t n = 3; n <= 6; ++n) {
    const std::vector<std::size_t> m3_form = {1, n + 1, 2 * n + 1, 3 * n + 1, 3 * n + 2, 4 * n + 1, 4 * n + 3};
    EXPECT_EQ(witness_rows(3, n), m3_form);
  }
}

TEST(Witness, PrintedObstruction) {
  EXPECT_EQ(reference_witness_submatrix(), printed_witness());
  const WitnessReport w = verify_non_tu_witness(3, 3);
  EXPECT_EQ(w.submatrix, printed_witness());
  EXPECT_TRUE(w.matches_reference);
  EXPECT_FALSE(w.partition_exists);
  EXPECT_EQ(w.patterns_searched, 128u);
  EXPECT_TRUE(w.refutes_tu());
  EXPECT_EQ(w.matrix_rows, 15u);
  EXPECT_EQ(w.matrix_cols, 27u);
  EXPECT_NE(w.to_text().find("NOT totally unimodular"), std::string::npos);
}

TEST(Witness, OtherSizes) {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{4, 5}, {3, 4}, {4, 3}, {5, 5}}) {
    const WitnessReport w = verify_non_tu_witness(m, n);
    EXPECT_EQ(w.submatrix, printed_witness());
    EXPECT_TRUE(w.refutes_tu());
    // independent extraction from the assembled matrix
    const IntMatrix A = barycenter_constraint_matrix(m, n);
    std::vector<std::size_t> r0, c0;
    for (std::size_t r : w.rows) r0.push_back(r - 1);
    for (std::size_t c : w.cols) c0.push_back(c - 1);
    EXPECT_EQ(take(A, r0, c0), printed_witness());
  }
  EXPECT_THROW(verify_non_tu_witness(2, 3), DomainError);
  EXPECT_THROW(verify_non_tu_witness(3, 2), DomainError);
}

TEST(Witness, ObstructionHasLargeMinor) {
  const TuVerdict v = is_tu_bruteforce(printed_witness());
  EXPECT_FALSE(v.totally_unimodular);
  EXPECT_GE(std::abs(v.determinant), 2);
  EXPECT_FALSE(naive_tu(printed_witness()));
}
