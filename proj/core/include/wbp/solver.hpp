#pragma once

#include <cstddef>

#include "wbp/core.hpp"
#include "wbp/dual.hpp"

namespace wbp {

struct SolverOptions {
  /// Residue is evaluated every `check_every` iterations (including iteration 0).
  std::size_t check_every = 10;
  std::size_t max_iterations = 1'000'000;
  /// Round the iterate at every residue evaluation and record its primal cost.
  bool record_primal = false;
};

struct SolveResult {
  /// B_k at the reported iterate; all share one column marginal.
  PlanStack plans;
  DualState dual;
  SolveReport report;
};

/// Raised when a solver hits its iteration cap. Carries everything computed so far.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, SolveReport report, DualState state)
      : Error(what), report_(std::move(report)), state_(std::move(state)) {}

  const SolveReport& report() const { return report_; }
  const DualState& state() const { return state_; }

 private:
  SolveReport report_;
  DualState state_;
};

/// exp(log B_k) for every block.
std::vector<Matrix> materialize_B(const DualObjective& objective, const DualState& state);

}  // namespace wbp
