#include "wbp/tu.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <utility>

namespace wbp {

namespace {

void require_ternary(const IntMatrix& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      if (M(i, j) < -1 || M(i, j) > 1) throw InputError("matrix entries must lie in {-1, 0, 1}");
}

std::vector<std::size_t> mask_to_rows(std::uint64_t mask) {
  std::vector<std::size_t> out;
  while (mask != 0) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

IntMatrix submatrix(const IntMatrix& M, const std::vector<std::size_t>& rows,
                    const std::vector<std::size_t>& cols) {
  IntMatrix s(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      s(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          M(static_cast<Eigen::Index>(rows[a]), static_cast<Eigen::Index>(cols[b]));
  return s;
}

__extension__ typedef __int128 Wide;

using Minors = std::vector<std::pair<std::uint64_t, std::int64_t>>;

class MinorSearch {
 public:
  MinorSearch(const IntMatrix& M, std::size_t max_order) : M_(M), max_order_(max_order) {
    column_rows_.resize(static_cast<std::size_t>(M.cols()));
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      for (Eigen::Index i = 0; i < M.rows(); ++i)
        if (M(i, j) != 0) column_rows_[static_cast<std::size_t>(j)].push_back(static_cast<std::size_t>(i));
  }

  TuVerdict run() {
    verdict_.checked_order = 0;
    const Minors base{{0, 1}};
    chosen_.clear();
    dfs(0, base);
    if (verdict_.totally_unimodular) {
      verdict_.checked_order = std::min<std::size_t>(
          max_order_, static_cast<std::size_t>(std::min(M_.rows(), M_.cols())));
    }
    return verdict_;
  }

 private:
  // Extends the chosen column set by each column >= `next`, given the nonzero minors on it.
  bool dfs(std::size_t next, const Minors& minors) {
    const std::size_t k = chosen_.size();
    if (k >= max_order_) return false;
    for (std::size_t c = next; c < column_rows_.size(); ++c) {
      Minors grown;
      grown.reserve(minors.size() * 2);
      for (const auto& [mask, det] : minors) {
        for (std::size_t r : column_rows_[c]) {
          const std::uint64_t bit = std::uint64_t{1} << r;
          if (mask & bit) continue;
          const std::uint64_t grown_mask = mask | bit;
          const auto pos = static_cast<std::size_t>(std::popcount(grown_mask & (bit - 1)));
          const std::int64_t sign = ((pos + k) % 2 == 0) ? 1 : -1;
          grown.emplace_back(grown_mask,
                             sign * M_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * det);
        }
      }
      std::sort(grown.begin(), grown.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      Minors merged;
      for (std::size_t i = 0; i < grown.size();) {
        std::size_t j = i;
        std::int64_t sum = 0;
        while (j < grown.size() && grown[j].first == grown[i].first) sum += grown[j++].second;
        if (sum != 0) merged.emplace_back(grown[i].first, sum);
        i = j;
      }
      if (merged.empty()) continue;
      chosen_.push_back(c);
      for (const auto& [mask, det] : merged) {
        if (det > 1 || det < -1) {
          verdict_.totally_unimodular = false;
          verdict_.checked_order = chosen_.size();
          verdict_.rows = mask_to_rows(mask);
          verdict_.cols = chosen_;
          verdict_.determinant = det;
          if (bareiss_determinant(submatrix(M_, verdict_.rows, verdict_.cols)) != det)
            throw InternalError("TU search: witness determinant does not re-verify");
          return true;
        }
      }
      if (dfs(c + 1, merged)) return true;
      chosen_.pop_back();
    }
    return false;
  }

  const IntMatrix& M_;
  std::size_t max_order_;
  std::vector<std::vector<std::size_t>> column_rows_;
  std::vector<std::size_t> chosen_;
  TuVerdict verdict_;
};

// Signed-sum search over the rows I restricted to columns touching I.
class PartitionSearch {
 public:
  PartitionSearch(const IntMatrix& M, const std::vector<std::size_t>& I) : I_(I) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      bool touched = false;
      for (std::size_t r : I) touched = touched || M(static_cast<Eigen::Index>(r), j) != 0;
      if (touched) cols_.push_back(j);
    }
    const std::size_t w = cols_.size();
    rows_.assign(I.size(), std::vector<int>(w, 0));
    for (std::size_t a = 0; a < I.size(); ++a)
      for (std::size_t b = 0; b < w; ++b)
        rows_[a][b] = M(static_cast<Eigen::Index>(I[a]), cols_[b]);
    // remaining_[a][b] = sum over rows a.. of |entry|, for pruning
    remaining_.assign(I.size() + 1, std::vector<int>(w, 0));
    for (std::size_t a = I.size(); a-- > 0;)
      for (std::size_t b = 0; b < w; ++b)
        remaining_[a][b] = remaining_[a + 1][b] + std::abs(rows_[a][b]);
    sums_.assign(w, 0);
    signs_.assign(I.size(), 0);
  }

  std::optional<RowPartition> run() {
    if (I_.empty()) return RowPartition{};
    if (assign(0)) {
      RowPartition p;
      for (std::size_t a = 0; a < I_.size(); ++a) (signs_[a] > 0 ? p.first : p.second).push_back(I_[a]);
      return p;
    }
    return std::nullopt;
  }

 private:
  bool assign(std::size_t a) {
    if (a == I_.size()) return true;  // pruning keeps every finished sum in [-1, 1]
    for (int s : {1, -1}) {
      if (a == 0 && s < 0) break;  // the global sign flip gives nothing new
      bool ok = true;
      for (std::size_t b = 0; b < sums_.size(); ++b) {
        sums_[b] += s * rows_[a][b];
        if (std::abs(sums_[b]) - remaining_[a + 1][b] > 1) ok = false;
      }
      signs_[a] = s;
      if (ok && assign(a + 1)) return true;
      for (std::size_t b = 0; b < sums_.size(); ++b) sums_[b] -= s * rows_[a][b];
    }
    return false;
  }

  const std::vector<std::size_t>& I_;
  std::vector<Eigen::Index> cols_;
  std::vector<std::vector<int>> rows_;
  std::vector<std::vector<int>> remaining_;
  std::vector<int> sums_;
  std::vector<int> signs_;
};

void check_subset(const IntMatrix& M, const std::vector<std::size_t>& I) {
  if (I.size() > kGhouilaHouriMaxSubset)
    throw SizeError("Ghouila-Houri subset search limited to " +
                    std::to_string(kGhouilaHouriMaxSubset) + " rows");
  for (std::size_t a = 0; a < I.size(); ++a) {
    if (I[a] >= static_cast<std::size_t>(M.rows())) throw InputError("row index out of range");
    for (std::size_t b = 0; b < a; ++b)
      if (I[a] == I[b]) throw InputError("row set contains a duplicate");
  }
}

}  // namespace

std::int64_t bareiss_determinant(const IntMatrix& square) {
  if (square.rows() != square.cols()) throw InputError("determinant of a non-square matrix");
  const Eigen::Index n = square.rows();
  if (n == 0) return 1;
  std::vector<std::vector<Wide>> a(static_cast<std::size_t>(n), std::vector<Wide>(static_cast<std::size_t>(n)));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = square(i, j);
  Wide sign = 1;
  Wide prev = 1;
  const auto nn = static_cast<std::size_t>(n);
  for (std::size_t k = 0; k + 1 < nn; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < nn && a[swap][k] == 0) ++swap;
      if (swap == nn) return 0;
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < nn; ++i) {
      for (std::size_t j = k + 1; j < nn; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return static_cast<std::int64_t>(sign * a[nn - 1][nn - 1]);
}

TuVerdict is_tu_bruteforce(const IntMatrix& M, std::size_t max_order) {
  require_ternary(M);
  if (M.rows() > 64) throw SizeError("brute-force TU check limited to 64 rows");
  return MinorSearch(M, max_order).run();
}

std::optional<RowPartition> ghouila_houri_subset_check(const IntMatrix& M,
                                                       const std::vector<std::size_t>& I) {
  require_ternary(M);
  check_subset(M, I);
  return PartitionSearch(M, I).run();
}

GhcVerdict is_tu_ghc_full(const IntMatrix& M, std::size_t max_rows) {
  require_ternary(M);
  const auto rows = static_cast<std::size_t>(M.rows());
  if (rows > max_rows || rows > 63)
    throw SizeError("full Ghouila-Houri check limited to " + std::to_string(max_rows) + " rows");
  GhcVerdict verdict;
  const std::uint64_t limit = std::uint64_t{1} << rows;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    const std::vector<std::size_t> I = mask_to_rows(mask);
    if (!PartitionSearch(M, I).run()) {
      verdict.totally_unimodular = false;
      verdict.witness_rows = I;
      return verdict;
    }
  }
  return verdict;
}

ReducedMatrix reduce_rows_n2(const IntMatrix& A, std::size_t m) {
  if (m < 2) throw UnsupportedError("row reduction needs m >= 2");
  const auto rows = static_cast<std::size_t>(A.rows());
  if (rows != 4 * m - 2 || static_cast<std::size_t>(A.cols()) != 4 * m)
    throw UnsupportedError("row reduction applies only to the n = 2 constraint matrix");
  ReducedMatrix out;
  std::vector<bool> drop(rows, false);
  for (std::size_t b = 1; b < m; ++b) {
    // 0-based rows of coupling block b are 2m + 2(b - 1) and the one after it
    const std::size_t first = 2 * m + 2 * (b - 1);
    const std::size_t removed = b % 2 == 1 ? first + 1 : first;
    const std::size_t other = b % 2 == 1 ? first : first + 1;
    drop[removed] = true;
    out.removed.push_back(removed);
    // marginal rows of measures b and b + 1 (1-based), i.e. 0-based rows 2(b-1) .. 2(b-1)+3
    std::vector<std::size_t> cert{2 * (b - 1), 2 * (b - 1) + 1, 2 * (b - 1) + 2, 2 * (b - 1) + 3, other};
    out.certificates.push_back(std::move(cert));
  }
  for (std::size_t r = 0; r < rows; ++r)
    if (!drop[r]) out.kept.push_back(r);
  out.matrix.resize(static_cast<Eigen::Index>(out.kept.size()), A.cols());
  for (std::size_t q = 0; q < out.kept.size(); ++q)
    out.matrix.row(static_cast<Eigen::Index>(q)) = A.row(static_cast<Eigen::Index>(out.kept[q]));
  return out;
}

bool verify_reduction_certificates(const IntMatrix& A, const ReducedMatrix& reduced) {
  if (reduced.removed.size() != reduced.certificates.size()) return false;
  for (std::size_t q = 0; q < reduced.removed.size(); ++q) {
    Eigen::VectorXi total = A.row(static_cast<Eigen::Index>(reduced.removed[q])).transpose();
    for (std::size_t r : reduced.certificates[q]) {
      if (std::find(reduced.kept.begin(), reduced.kept.end(), r) == reduced.kept.end()) return false;
      total += A.row(static_cast<Eigen::Index>(r)).transpose();
    }
    if (total.cwiseAbs().maxCoeff() != 0) return false;
  }
  return true;
}

IntMatrix reference_witness_submatrix() {
  IntMatrix r(7, 7);
  r << -1, -1, 0, 0, 0, 0, 0,  //
      0, 0, 1, 1, 0, 0, 0,     //
      0, 0, 0, 0, 0, -1, -1,   //
      1, 0, 0, 0, -1, 0, 0,    //
      0, 1, -1, 0, 0, 0, 0,    //
      0, 0, 0, 0, -1, 1, 0,    //
      0, 0, 0, -1, 0, 0, 1;
  return r;
}

std::vector<std::size_t> witness_rows(std::size_t m, std::size_t n) {
  const std::size_t c = m * n;
  return {1, n + 1, 2 * n + 1, c + 1, c + 2, c + n + 1, c + n + 3};
}

std::vector<std::size_t> witness_cols(std::size_t n) {
  const std::size_t s = n * n;
  return {1, 2, s + 2, s + 3, s + n + 1, 2 * s + 1, 2 * s + 3};
}

WitnessReport verify_non_tu_witness(std::size_t m, std::size_t n) {
  if (m < 3 || n < 3) throw DomainError("the non-TU obstruction needs m >= 3 and n >= 3");
  const IntMatrix A = barycenter_constraint_matrix(m, n);
  WitnessReport report;
  report.m = m;
  report.n = n;
  report.matrix_rows = static_cast<std::size_t>(A.rows());
  report.matrix_cols = static_cast<std::size_t>(A.cols());
  report.rows = witness_rows(m, n);
  report.cols = witness_cols(n);
  std::vector<std::size_t> r0, c0;
  for (std::size_t r : report.rows) r0.push_back(r - 1);
  for (std::size_t c : report.cols) c0.push_back(c - 1);
  report.submatrix = submatrix(A, r0, c0);
  report.matches_reference = report.submatrix == reference_witness_submatrix();

  // Restricting to the listed columns can only make a partition easier to find, so none
  // existing here rules one out for the full rows of A. All 2^7 splits are tried.
  report.partition_exists = false;
  const Eigen::Index k = report.submatrix.rows();
  for (std::uint64_t first = 0; first < (std::uint64_t{1} << k); ++first) {
    ++report.patterns_searched;
    Eigen::VectorXi sums = Eigen::VectorXi::Zero(report.submatrix.cols());
    for (Eigen::Index i = 0; i < k; ++i)
      sums += ((first >> i) & 1 ? 1 : -1) * report.submatrix.row(i).transpose();
    if (sums.cwiseAbs().maxCoeff() <= 1) {
      report.partition_exists = true;
      break;
    }
  }
  return report;
}

std::string WitnessReport::to_text() const {
  std::ostringstream s;
  s << "constraint matrix A(" << m << ", " << n << "): " << matrix_rows << " x " << matrix_cols << '\n';
  s << "rows I:";
  for (std::size_t r : rows) s << ' ' << r;
  s << "\ncolumns:";
  for (std::size_t c : cols) s << ' ' << c;
  s << "\nsubmatrix:\n";
  for (Eigen::Index i = 0; i < submatrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < submatrix.cols(); ++j) {
      s << (j ? " " : "  ");
      if (submatrix(i, j) >= 0) s << ' ';
      s << submatrix(i, j);
    }
    s << '\n';
  }
  s << "matches reference obstruction: " << (matches_reference ? "yes" : "no") << '\n';
  s << "partition search: " << (partition_exists ? "partition found" : "no valid partition")
    << " (" << patterns_searched << " splits tried)\n";
  s << "verdict: " << (refutes_tu() ? "NOT totally unimodular" : "inconclusive") << '\n';
  return s.str();
}

}  // namespace wbp
