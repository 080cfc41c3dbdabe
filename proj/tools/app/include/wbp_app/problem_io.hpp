#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "wbp/core.hpp"

namespace wbp::app {

using Json = nlohmann::json;

/// Parses the problem schema. Explicit "cost_matrices" override the metric; "p" defaults to 2
/// and "metric" to "euclidean". Throws InputError with a readable message on any defect.
BarycenterProblem problem_from_json(const Json& doc);
BarycenterProblem load_problem(const std::filesystem::path& path);

/// Inverse of problem_from_json. Cost matrices are written only when `with_costs` is set.
Json problem_to_json(const BarycenterProblem& problem, bool with_costs = false);

/// FNV-1a (64 bit) of the canonical serialization of the parsed problem, as 16 hex digits.
std::string instance_hash(const BarycenterProblem& problem);

std::uint64_t fnv1a64(const std::string& bytes);

/// Reads a whole file; InputError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes `text`, adding a trailing newline when missing.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace wbp::app
