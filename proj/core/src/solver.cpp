#include "wbp/solver.hpp"

namespace wbp {

std::vector<Matrix> materialize_B(const DualObjective& objective, const DualState& state) {
  std::vector<Matrix> out;
  out.reserve(objective.m());
  for (std::size_t k = 0; k < objective.m(); ++k) {
    Matrix log_b = objective.log_B(k, state);
    if (!log_b.allFinite()) throw InternalError("materialize_B: non-finite exponent");
    if (log_b.maxCoeff() >= 700.0)
      throw InternalError("materialize_B: iterate overflows the linear domain");
    out.push_back(log_b.array().exp().matrix());
  }
  return out;
}

}  // namespace wbp
