#include "wbp_app/problem_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace wbp::app {

namespace {

[[noreturn]] void bad(const std::string& what) { throw InputError("problem: " + what); }

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) bad(where + " must be a number");
  return v.get<double>();
}

Vector vector_of(const Json& v, const std::string& where) {
  if (!v.is_array()) bad(where + " must be an array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = number(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

Matrix matrix_of(const Json& v, const std::string& where, Eigen::Index cols = -1) {
  if (!v.is_array() || v.empty()) bad(where + " must be a non-empty array of rows");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array()) bad(where + "[" + std::to_string(i) + "] must be an array");
  }
  if (cols < 0) cols = static_cast<Eigen::Index>(v[0].size());
  Matrix out(static_cast<Eigen::Index>(v.size()), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string row = where + "[" + std::to_string(i) + "]";
    if (static_cast<Eigen::Index>(v[i].size()) != cols) bad(row + " has the wrong length");
    out.row(static_cast<Eigen::Index>(i)) = vector_of(v[i], row).transpose();
  }
  return out;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Matrix& x) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(to_json(Vector(x.row(i).transpose())));
  return out;
}

}  // namespace

BarycenterProblem problem_from_json(const Json& doc) {
  if (!doc.is_object()) bad("top level must be an object");
  for (const char* key : {"support", "measures", "omega"}) {
    if (!doc.contains(key)) bad(std::string("missing \"") + key + "\"");
  }
  const Matrix support = matrix_of(doc["support"], "support");
  const auto n = support.rows();

  const Json& measures = doc["measures"];
  if (!measures.is_array() || measures.empty()) bad("measures must be a non-empty array");
  Matrix weights(static_cast<Eigen::Index>(measures.size()), n);
  for (std::size_t k = 0; k < measures.size(); ++k) {
    const std::string where = "measures[" + std::to_string(k) + "]";
    if (!measures[k].is_object() || !measures[k].contains("weights")) bad(where + " needs \"weights\"");
    const Vector w = vector_of(measures[k]["weights"], where + ".weights");
    if (w.size() != n) bad(where + ".weights length does not match the support");
    weights.row(static_cast<Eigen::Index>(k)) = w.transpose();
  }
  const Vector omega = vector_of(doc["omega"], "omega");

  double p = 2.0;
  if (doc.contains("p")) p = number(doc["p"], "p");
  Metric metric = Metric::euclidean;
  if (doc.contains("metric")) {
    if (!doc["metric"].is_string()) bad("metric must be a string");
    metric = parse_metric(doc["metric"].get<std::string>());
  }

  std::vector<Matrix> costs;
  if (doc.contains("cost_matrices")) {
    const Json& cm = doc["cost_matrices"];
    if (!cm.is_array() || cm.size() != measures.size()) bad("cost_matrices must hold one matrix per measure");
    for (std::size_t k = 0; k < cm.size(); ++k) {
      Matrix c = matrix_of(cm[k], "cost_matrices[" + std::to_string(k) + "]", n);
      if (c.rows() != n) bad("cost_matrices[" + std::to_string(k) + "] is not n x n");
      costs.push_back(std::move(c));
    }
  } else {
    const Matrix c = build_cost_matrix(support, p, metric);
    costs.assign(static_cast<std::size_t>(weights.rows()), c);
  }
  return BarycenterProblem(support, weights, omega, std::move(costs), p, metric);
}

BarycenterProblem load_problem(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return problem_from_json(doc);
}

Json problem_to_json(const BarycenterProblem& problem, bool with_costs) {
  Json doc;
  doc["support"] = to_json(problem.support());
  Json measures = Json::array();
  for (std::size_t k = 0; k < problem.m(); ++k) measures.push_back({{"weights", to_json(problem.u(k))}});
  doc["measures"] = std::move(measures);
  doc["omega"] = to_json(problem.omega());
  doc["p"] = problem.p();
  doc["metric"] = std::string(metric_name(problem.metric()));
  if (with_costs) {
    Json cm = Json::array();
    for (const Matrix& c : problem.costs()) cm.push_back(to_json(c));
    doc["cost_matrices"] = std::move(cm);
  }
  return doc;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string instance_hash(const BarycenterProblem& problem) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(problem_to_json(problem, true).dump())));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
  if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace wbp::app
