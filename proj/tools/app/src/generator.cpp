#include "wbp_app/generator.hpp"

#include <cmath>
#include <numbers>

namespace wbp::app {

double PortableRng::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double PortableRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open()));
  const double a = 2.0 * std::numbers::pi * uniform_open();
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::size_t PortableRng::below(std::size_t bound) {
  const auto k = static_cast<std::size_t>(uniform_open() * static_cast<double>(bound));
  return k < bound ? k : bound - 1;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

BarycenterProblem generate_problem(const GeneratorOptions& o) {
  if (o.m < 1 || o.n < 1 || o.dim < 1 || o.components < 1)
    throw InputError("gen: m, n, dim and components must be at least 1");
  if (!(o.spread >= 0.0) || !(o.cov_scale >= 0.0)) throw InputError("gen: spread and cov-scale must be >= 0");
  PortableRng rng(o.seed);
  const auto n = static_cast<Eigen::Index>(o.n);
  const auto d = static_cast<Eigen::Index>(o.dim);

  Matrix means(static_cast<Eigen::Index>(o.components), d);
  for (Eigen::Index c = 0; c < means.rows(); ++c)
    for (Eigen::Index j = 0; j < d; ++j) means(c, j) = o.spread * rng.normal();

  Matrix support(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(rng.below(o.components));
    for (Eigen::Index j = 0; j < d; ++j) support(i, j) = means(c, j) + o.cov_scale * rng.normal();
  }

  Matrix cost = build_cost_matrix(support, o.p, o.metric);
  if (o.normalize && cost.maxCoeff() > 0.0) {
    // every metric here is 1-homogeneous in the support, so C scales by s^p (or s^2p)
    const double degree = o.metric == Metric::squared_euclidean ? 2.0 * o.p : o.p;
    support *= std::pow(cost.maxCoeff(), -1.0 / degree);
    cost = build_cost_matrix(support, o.p, o.metric);
  }

  Matrix weights(static_cast<Eigen::Index>(o.m), n);
  for (Eigen::Index k = 0; k < weights.rows(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) weights(k, i) = rng.uniform_open();
    weights.row(k) /= weights.row(k).sum();
  }
  const Vector omega = Vector::Constant(static_cast<Eigen::Index>(o.m), 1.0 / static_cast<double>(o.m));
  return BarycenterProblem(support, weights, omega,
                           std::vector<Matrix>(o.m, cost), o.p, o.metric);
}

}  // namespace wbp::app
