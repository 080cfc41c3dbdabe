#pragma once

#include <cstdint>
#include <random>

#include "wbp/core.hpp"

namespace wbp::app {

/// Gaussian-mixture instances: n shared support points in R^dim, m weight vectors drawn
/// uniform(0, 1) and normalized, uniform omega.
struct GeneratorOptions {
  std::size_t m = 15;
  std::size_t n = 10;
  std::size_t dim = 3;
  std::uint64_t seed = 0;
  std::size_t components = 3;
  /// Standard deviation of the component means around the origin.
  double spread = 5.0;
  /// Standard deviation of each component (isotropic).
  double cov_scale = 1.0;
  /// Rescale the support so the largest cost is 1.
  bool normalize = true;
  double p = 2.0;
  Metric metric = Metric::euclidean;
};

/// Portable sampler on top of mt19937_64, whose output is fixed by the standard. The standard
/// distributions are implementation-defined, so they are not used.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1), never exactly 0 or 1.
  double uniform_open();
  double normal();
  std::size_t below(std::size_t bound);
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

BarycenterProblem generate_problem(const GeneratorOptions& options);

/// splitmix64 finalizer; trial i of a benchmark uses splitmix64(master + i).
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace wbp::app
