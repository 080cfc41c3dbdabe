#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wbp/constraint.hpp"

namespace wbp {

/// Exact determinant of a square integer matrix by fraction-free (Bareiss) elimination.
std::int64_t bareiss_determinant(const IntMatrix& square);

struct TuVerdict {
  bool totally_unimodular = true;
  /// Largest order examined (equals min(rows, cols, max_order) on confirmation).
  std::size_t checked_order = 0;
  /// Witness on refutation: 0-based row and column indices and the offending determinant.
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  std::int64_t determinant = 0;
};

/// Examines every square submatrix up to `max_order`.
///
/// Columns are added in increasing order while the nonzero minors over the chosen columns are
/// carried along by cofactor expansion on the newest column, so each minor costs one
/// expansion instead of one elimination, and column sets whose minors all vanish are pruned
/// (every larger minor through them vanishes too). A reported witness is re-checked with
/// bareiss_determinant. Entries must lie in {-1, 0, 1}; at most 64 rows.
TuVerdict is_tu_bruteforce(const IntMatrix& M,
                           std::size_t max_order = std::numeric_limits<std::size_t>::max());

/// A split of a row set into two parts, as 0-based row indices.
struct RowPartition {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

/// Largest row set ghouila_houri_subset_check accepts.
inline constexpr std::size_t kGhouilaHouriMaxSubset = 25;

/// Searches for a partition of the rows I with every signed column sum in {-1, 0, 1}.
/// The search is exhaustive over sign patterns (with the first row's sign fixed) and prunes a
/// branch once some column can no longer return to [-1, 1]; std::nullopt proves none exists.
std::optional<RowPartition> ghouila_houri_subset_check(const IntMatrix& M,
                                                       const std::vector<std::size_t>& I);

struct GhcVerdict {
  bool totally_unimodular = true;
  /// First row subset (in increasing bitmask order) with no valid partition.
  std::vector<std::size_t> witness_rows;
};

/// The Ghouila-Houri criterion over all row subsets. Throws SizeError above `max_rows` rows.
GhcVerdict is_tu_ghc_full(const IntMatrix& M, std::size_t max_rows = 20);

struct ReducedMatrix {
  IntMatrix matrix;                   ///< (3m - 1) x 4m
  std::vector<std::size_t> kept;      ///< rows of A retained, 0-based
  std::vector<std::size_t> removed;   ///< rows of A dropped, 0-based
  /// For each removed row, the retained rows whose sum is its negation (0-based rows of A).
  std::vector<std::vector<std::size_t>> certificates;
};

/// Drops one row from each coupling block of A(m, 2): the second row of odd blocks and the
/// first row of even blocks (1-based block numbering). Each dropped row equals minus the sum of
/// the marginal rows of the two coupled measures and the other row of its block.
/// Throws UnsupportedError unless A has the n = 2 shape for this m.
ReducedMatrix reduce_rows_n2(const IntMatrix& A, std::size_t m);

/// Checks that every certificate in `reduced` holds exactly for A.
bool verify_reduction_certificates(const IntMatrix& A, const ReducedMatrix& reduced);

struct WitnessReport {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t matrix_rows = 0;
  std::size_t matrix_cols = 0;
  std::vector<std::size_t> rows;  ///< I, 1-based
  std::vector<std::size_t> cols;  ///< 1-based
  IntMatrix submatrix;            ///< rows I and the listed columns
  bool matches_reference = false; ///< submatrix equals reference_witness_submatrix()
  bool partition_exists = true;
  /// Splits of I tried (all 2^7 when none works).
  std::size_t patterns_searched = 0;

  bool refutes_tu() const { return !partition_exists; }
  std::string to_text() const;
};

/// The 7 x 7 obstruction every A(m, n) with m, n >= 3 contains.
IntMatrix reference_witness_submatrix();

/// I = {1, n+1, 2n+1, mn+1, mn+2, mn+n+1, mn+n+3}: the first row of the first three marginal
/// blocks, rows 1 and 2 of the first coupling block, rows 1 and 3 of the second. 1-based.
std::vector<std::size_t> witness_rows(std::size_t m, std::size_t n);

/// {1, 2, n^2+2, n^2+3, n^2+n+1, 2n^2+1, 2n^2+3}, 1-based.
std::vector<std::size_t> witness_cols(std::size_t n);

/// Builds A(m, n), extracts the obstruction and searches all partitions of its row set.
/// Throws DomainError unless m >= 3 and n >= 3.
WitnessReport verify_non_tu_witness(std::size_t m, std::size_t n);

}  // namespace wbp
