#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "wbp/constraint.hpp"
#include "wbp/core.hpp"

namespace wbp {

struct Arc {
  std::size_t tail = 0;
  std::size_t head = 0;
  double capacity = 0.0;
  double cost = 0.0;
};

/// Directed network with node supplies (positive = source, negative = sink).
struct FlowNetwork {
  enum class Tier { warehouse, transshipment, retail, other };

  std::vector<double> supply;
  std::vector<Tier> tiers;
  std::vector<Arc> arcs;

  std::size_t nodes() const { return supply.size(); }
  /// Column per arc with +1 at the tail and -1 at the head.
  IntMatrix incidence() const;
};

/// The m = 2 barycenter LP as a three-tier transshipment network: arc (i, n + j) carries
/// (X_1)_ij at cost omega_1 (C_1)_ij and arc (n + i, 2n + j) carries (X_2)_ji at cost
/// omega_2 (C_2)_ji. Flow through transshipment node n + j is the barycenter weight u_j.
/// Throws UnsupportedError unless m = 2.
FlowNetwork export_min_cost_flow(const BarycenterProblem& problem);

struct FlowSolution {
  double cost = 0.0;
  std::vector<double> flow;  ///< per arc
};

/// Successive shortest paths with Bellman-Ford on the residual graph. Real capacities.
FlowSolution solve_min_cost_flow(const FlowNetwork& network);

/// Recovers (X_1, X_2) and the barycenter from a flow on an exported network.
PlanStack plans_from_flow(const FlowNetwork& network, const FlowSolution& flow, std::size_t n);

/// Text format: "p min <nodes> <arcs>", then "n <id> <supply>" for nonzero supplies and
/// "a <tail> <head> <capacity> <cost>" per arc, ids 1-based; lines starting with 'c' are comments.
void write_dimacs(const FlowNetwork& network, std::ostream& out);
std::string to_dimacs(const FlowNetwork& network);
/// Inverse of write_dimacs (tiers are not encoded and come back as `other`).
FlowNetwork read_dimacs(std::istream& in);

}  // namespace wbp
