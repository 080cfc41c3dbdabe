#include "wbp_app/report.hpp"

#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace wbp::app {

namespace {

Json history(const std::vector<HistoryPoint>& h) {
  Json out = Json::array();
  for (const HistoryPoint& p : h) out.push_back(Json::array({p.iteration, p.value}));
  return out;
}

// JSON has no NaN or infinity; nlohmann would write null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

const std::vector<std::string>& required_keys() {
  static const std::vector<std::string> keys = {
      "algorithm",   "eta",           "eps_prime",     "seed",           "iterations",
      "wall_time_ms", "residue_history", "objective_history", "barycenter", "primal_value",
      "instance_hash"};
  return keys;
}

}  // namespace

std::string gap_reference_name(GapReference ref) {
  return ref == GapReference::lp ? "lp" : "ibp_dual";
}

Json report_to_json(const SolveReport& report, const ReportExtras& extras) {
  Json doc;
  doc["algorithm"] = report.algorithm;
  doc["eta"] = report.eta;
  doc["eps_prime"] = report.eps_prime;
  if (extras.epsilon) doc["epsilon"] = *extras.epsilon;
  doc["seed"] = report.seed;
  doc["iterations"] = report.iterations;
  doc["converged"] = extras.converged;
  doc["wall_time_ms"] = report.wall_time_ms;
  doc["residue_history"] = history(report.residue_history);
  doc["objective_history"] = history(report.objective_history);
  if (!report.primal_history.empty()) doc["primal_history"] = history(report.primal_history);
  Json bary = Json::array();
  for (Eigen::Index i = 0; i < extras.barycenter.size(); ++i) bary.push_back(extras.barycenter(i));
  doc["barycenter"] = std::move(bary);
  doc["primal_value"] = finite_or_null(extras.primal_value);
  if (extras.lp_optimum) doc["lp_optimum"] = *extras.lp_optimum;
  if (extras.gap_reference) {
    doc["gap_reference"] = gap_reference_name(*extras.gap_reference);
    if (extras.gap_reference_value) doc["gap_reference_value"] = *extras.gap_reference_value;
  }
  if (report.algorithm.starts_with("aibp")) doc["estimate_restarts"] = report.estimate_restarts;
  doc["instance_hash"] = extras.instance_hash;
  return doc;
}

std::vector<std::string> validate_report(const Json& doc) {
  std::vector<std::string> errors;
  if (!doc.is_object()) return {"report must be an object"};
  for (const std::string& key : required_keys()) {
    if (!doc.contains(key)) errors.push_back("missing \"" + key + "\"");
  }
  auto check = [&](const char* key, auto&& ok, const char* what) {
    if (doc.contains(key) && !ok(doc[key])) errors.push_back(std::string("\"") + key + "\" must be " + what);
  };
  auto nonneg_number = [](const Json& v) { return v.is_number() && v.get<double>() >= 0.0; };
  auto count = [](const Json& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0); };
  auto pairs = [](const Json& v) {
    if (!v.is_array()) return false;
    for (const Json& p : v) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || p[0].get<long long>() < 0 ||
          !p[1].is_number())
        return false;
    }
    return true;
  };
  check("algorithm", [](const Json& v) { return v.is_string() && !v.get<std::string>().empty(); },
        "a non-empty string");
  check("eta", nonneg_number, "a nonnegative number");
  check("eps_prime", nonneg_number, "a nonnegative number");
  check("epsilon", [](const Json& v) { return v.is_number() && v.get<double>() > 0.0; }, "a positive number");
  check("seed", count, "a nonnegative integer");
  check("iterations", count, "a nonnegative integer");
  check("converged", [](const Json& v) { return v.is_boolean(); }, "a boolean");
  check("wall_time_ms", nonneg_number, "a nonnegative number");
  check("residue_history", pairs, "an array of [iteration, value] pairs");
  check("objective_history", pairs, "an array of [iteration, value] pairs");
  check("primal_history", pairs, "an array of [iteration, value] pairs");
  check("barycenter",
        [](const Json& v) {
          if (!v.is_array() || v.empty()) return false;
          for (const Json& x : v)
            if (!x.is_number() || x.get<double>() < 0.0) return false;
          return true;
        },
        "a non-empty array of nonnegative numbers");
  check("primal_value", [](const Json& v) { return v.is_number() || v.is_null(); }, "a number or null");
  check("lp_optimum", [](const Json& v) { return v.is_number(); }, "a number");
  check("gap_reference",
        [](const Json& v) { return v.is_string() && (v == "lp" || v == "ibp_dual"); }, "\"lp\" or \"ibp_dual\"");
  check("gap_reference_value", [](const Json& v) { return v.is_number(); }, "a number");
  check("estimate_restarts", count, "a nonnegative integer");
  check("instance_hash",
        [](const Json& v) {
          if (!v.is_string() || v.get<std::string>().size() != 16) return false;
          for (char c : v.get<std::string>())
            if (!std::isxdigit(static_cast<unsigned char>(c)) || std::isupper(static_cast<unsigned char>(c)))
              return false;
          return true;
        },
        "16 lowercase hex digits");
  static const std::vector<std::string> optional = {"epsilon", "converged", "primal_history", "lp_optimum",
                                                     "gap_reference", "gap_reference_value", "estimate_restarts"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    bool known = false;
    for (const std::string& k : required_keys()) known = known || k == key;
    for (const std::string& k : optional) known = known || k == key;
    if (!known) errors.push_back("unexpected key \"" + key + "\"");
  }
  return errors;
}

std::string trace_csv(const SolveReport& report, GapReference ref, double reference_value) {
  const auto& values = ref == GapReference::lp ? report.primal_history : report.objective_history;
  if (values.size() != report.residue_history.size())
    throw InputError("trace: history lengths disagree (was the primal history recorded?)");
  std::ostringstream s;
  s << std::setprecision(17);
  s << "iter,gap,residue\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    s << values[i].iteration << ',' << values[i].value - reference_value << ','
      << report.residue_history[i].value << '\n';
  return s.str();
}

Json witness_to_json(const WitnessReport& w) {
  Json sub = Json::array();
  for (Eigen::Index i = 0; i < w.submatrix.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < w.submatrix.cols(); ++j) row.push_back(w.submatrix(i, j));
    sub.push_back(std::move(row));
  }
  return {{"m", w.m},
          {"n", w.n},
          {"matrix_rows", w.matrix_rows},
          {"matrix_cols", w.matrix_cols},
          {"rows", w.rows},
          {"cols", w.cols},
          {"submatrix", std::move(sub)},
          {"matches_reference", w.matches_reference},
          {"partition_exists", w.partition_exists},
          {"patterns_searched", w.patterns_searched},
          {"totally_unimodular", w.refutes_tu() ? Json(false) : Json(nullptr)}};
}

}  // namespace wbp::app
