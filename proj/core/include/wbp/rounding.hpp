#pragma once

#include <span>

#include "wbp/core.hpp"

namespace wbp {

/// Repairs a near-feasible plan stack to one with exact row marginals u_k and a single shared
/// column marginal, which becomes the returned barycenter.
///
/// The four stages are a row rescale, a shared column target, a column rescale and a rank-one
/// correction. For every k the output satisfies
///   ||X_k - B_k||_1 <= 2 (||r(B_k) - u_k||_1 + ||l(B_k) - u_hat||_1).
///
/// `targets` is m x n with row k equal to u_k. Entries of B must be nonnegative; targets must be
/// probability vectors (zero entries are allowed).
PlanStack round_plans(std::span<const Matrix> B, const Matrix& targets, const Vector& omega);

}  // namespace wbp
