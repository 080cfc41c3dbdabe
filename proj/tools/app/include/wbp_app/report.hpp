#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wbp/core.hpp"
#include "wbp/tu.hpp"
#include "wbp_app/problem_io.hpp"

namespace wbp::app {

/// How the gap column of a trace is measured.
enum class GapReference {
  /// primal cost of the rounded iterate minus the exact LP optimum
  lp,
  /// dual objective at the iterate minus a long IBP run's dual value at the same eta
  ibp_dual,
};

std::string gap_reference_name(GapReference ref);

struct ReportExtras {
  std::optional<double> epsilon;  ///< set for the full smoothing/rounding pipeline
  Vector barycenter;
  double primal_value = 0.0;
  std::optional<double> lp_optimum;
  std::optional<GapReference> gap_reference;
  std::optional<double> gap_reference_value;
  std::string instance_hash;
  bool converged = true;
};

Json report_to_json(const SolveReport& report, const ReportExtras& extras);

/// Every schema violation in `doc`, empty when the report is valid. Mirrors docs/report.schema.json.
std::vector<std::string> validate_report(const Json& doc);

/// `iter,gap,residue`, one row per residue evaluation. For the LP reference the report needs
/// a primal history; for the dual reference the objective history is used.
std::string trace_csv(const SolveReport& report, GapReference ref, double reference_value);

Json witness_to_json(const WitnessReport& w);

}  // namespace wbp::app
