#include "wbp/flow.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace wbp {

namespace {

constexpr double kFlowEps = 1e-15;

struct ResidualArc {
  std::size_t to;
  double cap;
  double cost;
  std::size_t rev;
  std::ptrdiff_t original;  // index into network.arcs, -1 for helper/reverse arcs
};

}  // namespace

IntMatrix FlowNetwork::incidence() const {
  IntMatrix a = IntMatrix::Zero(static_cast<Eigen::Index>(nodes()), static_cast<Eigen::Index>(arcs.size()));
  for (std::size_t e = 0; e < arcs.size(); ++e) {
    a(static_cast<Eigen::Index>(arcs[e].tail), static_cast<Eigen::Index>(e)) += 1;
    a(static_cast<Eigen::Index>(arcs[e].head), static_cast<Eigen::Index>(e)) -= 1;
  }
  return a;
}

FlowNetwork export_min_cost_flow(const BarycenterProblem& problem) {
  if (problem.m() != 2)
    throw UnsupportedError("min-cost-flow export exists only for m = 2 measures");
  const std::size_t n = problem.n();
  FlowNetwork net;
  net.supply.assign(3 * n, 0.0);
  net.tiers.resize(3 * n);
  const Vector u1 = problem.u(0);
  const Vector u2 = problem.u(1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    net.supply[i] = u1(ii);
    net.supply[2 * n + i] = -u2(ii);
    net.tiers[i] = FlowNetwork::Tier::warehouse;
    net.tiers[n + i] = FlowNetwork::Tier::transshipment;
    net.tiers[2 * n + i] = FlowNetwork::Tier::retail;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += net.supply[i];
  const Matrix& c1 = problem.cost(0);
  const Matrix& c2 = problem.cost(1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      net.arcs.push_back({i, n + j, total,
                          problem.omega(0) * c1(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      net.arcs.push_back({n + i, 2 * n + j, total,
                          problem.omega(1) * c2(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))});
  return net;
}

FlowSolution solve_min_cost_flow(const FlowNetwork& network) {
  const std::size_t nodes = network.nodes();
  double balance = 0.0;
  for (double s : network.supply) balance += s;
  if (std::abs(balance) > 1e-12) throw InputError("min-cost flow: supplies do not balance");

  const std::size_t source = nodes;
  const std::size_t sink = nodes + 1;
  std::vector<std::vector<ResidualArc>> g(nodes + 2);
  auto add = [&](std::size_t u, std::size_t v, double cap, double cost, std::ptrdiff_t orig) {
    g[u].push_back({v, cap, cost, g[v].size(), orig});
    g[v].push_back({u, 0.0, -cost, g[u].size() - 1, -1});
  };
  for (std::size_t e = 0; e < network.arcs.size(); ++e) {
    const Arc& a = network.arcs[e];
    if (a.tail >= nodes || a.head >= nodes) throw InputError("min-cost flow: arc endpoint out of range");
    if (a.capacity < 0.0) throw InputError("min-cost flow: negative capacity");
    add(a.tail, a.head, a.capacity, a.cost, static_cast<std::ptrdiff_t>(e));
  }
  double required = 0.0;
  for (std::size_t v = 0; v < nodes; ++v) {
    if (network.supply[v] > 0.0) {
      add(source, v, network.supply[v], 0.0, -1);
      required += network.supply[v];
    } else if (network.supply[v] < 0.0) {
      add(v, sink, -network.supply[v], 0.0, -1);
    }
  }

  const double inf = std::numeric_limits<double>::infinity();
  double sent = 0.0;
  const double stop = std::max(kFlowEps, 1e-13 * required);
  while (required - sent > stop) {
    std::vector<double> dist(nodes + 2, inf);
    std::vector<std::size_t> prev_node(nodes + 2), prev_arc(nodes + 2);
    dist[source] = 0.0;
    for (std::size_t round = 0; round < nodes + 2; ++round) {
      bool changed = false;
      for (std::size_t u = 0; u < nodes + 2; ++u) {
        if (dist[u] == inf) continue;
        for (std::size_t idx = 0; idx < g[u].size(); ++idx) {
          const ResidualArc& ra = g[u][idx];
          if (ra.cap <= kFlowEps) continue;
          const double nd = dist[u] + ra.cost;
          if (nd < dist[ra.to] - 1e-15) {
            dist[ra.to] = nd;
            prev_node[ra.to] = u;
            prev_arc[ra.to] = idx;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == inf) throw SolverError("min-cost flow: supplies cannot be routed");
    double push = required - sent;
    for (std::size_t v = sink; v != source; v = prev_node[v])
      push = std::min(push, g[prev_node[v]][prev_arc[v]].cap);
    for (std::size_t v = sink; v != source; v = prev_node[v]) {
      ResidualArc& ra = g[prev_node[v]][prev_arc[v]];
      ra.cap -= push;
      g[v][ra.rev].cap += push;
    }
    sent += push;
  }

  FlowSolution out;
  out.flow.assign(network.arcs.size(), 0.0);
  for (std::size_t u = 0; u < nodes; ++u) {
    for (const ResidualArc& ra : g[u]) {
      if (ra.original < 0) continue;
      const auto e = static_cast<std::size_t>(ra.original);
      out.flow[e] = network.arcs[e].capacity - ra.cap;
    }
  }
  for (std::size_t e = 0; e < network.arcs.size(); ++e) out.cost += out.flow[e] * network.arcs[e].cost;
  return out;
}

PlanStack plans_from_flow(const FlowNetwork& network, const FlowSolution& flow, std::size_t n) {
  if (network.nodes() != 3 * n || network.arcs.size() != 2 * n * n || flow.flow.size() != 2 * n * n)
    throw InputError("plans_from_flow: network is not a three-tier export for this n");
  const auto nn = static_cast<Eigen::Index>(n);
  PlanStack out;
  Matrix x1 = Matrix::Zero(nn, nn);
  Matrix x2 = Matrix::Zero(nn, nn);
  for (std::size_t e = 0; e < network.arcs.size(); ++e) {
    const Arc& a = network.arcs[e];
    if (a.tail < n) {
      x1(static_cast<Eigen::Index>(a.tail), static_cast<Eigen::Index>(a.head - n)) += flow.flow[e];
    } else {
      // arc (n + i, 2n + j) is entry (j, i) of X_2
      x2(static_cast<Eigen::Index>(a.head - 2 * n), static_cast<Eigen::Index>(a.tail - n)) += flow.flow[e];
    }
  }
  out.barycenter = col_sums(x1);
  out.plans = {std::move(x1), std::move(x2)};
  return out;
}

void write_dimacs(const FlowNetwork& network, std::ostream& out) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "c barycenter min-cost flow\n";
  s << "p min " << network.nodes() << ' ' << network.arcs.size() << '\n';
  for (std::size_t v = 0; v < network.nodes(); ++v) {
    if (network.supply[v] != 0.0) s << "n " << v + 1 << ' ' << network.supply[v] << '\n';
  }
  for (const Arc& a : network.arcs)
    s << "a " << a.tail + 1 << ' ' << a.head + 1 << ' ' << a.capacity << ' ' << a.cost << '\n';
  out << s.str();
}

std::string to_dimacs(const FlowNetwork& network) {
  std::ostringstream s;
  write_dimacs(network, s);
  return s.str();
}

FlowNetwork read_dimacs(std::istream& in) {
  FlowNetwork net;
  std::size_t declared_arcs = 0;
  bool have_problem = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw InputError("DIMACS line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    char tag = 0;
    ls >> tag;
    if (tag == 'p') {
      std::string kind;
      std::size_t nodes = 0;
      if (!(ls >> kind >> nodes >> declared_arcs) || kind != "min") fail("bad problem line");
      net.supply.assign(nodes, 0.0);
      net.tiers.assign(nodes, FlowNetwork::Tier::other);
      have_problem = true;
    } else if (tag == 'n') {
      std::size_t id = 0;
      double supply = 0.0;
      if (!have_problem || !(ls >> id >> supply) || id < 1 || id > net.nodes()) fail("bad node line");
      net.supply[id - 1] = supply;
    } else if (tag == 'a') {
      Arc a;
      std::size_t tail = 0, head = 0;
      if (!have_problem || !(ls >> tail >> head >> a.capacity >> a.cost) || tail < 1 || head < 1 ||
          tail > net.nodes() || head > net.nodes())
        fail("bad arc line");
      a.tail = tail - 1;
      a.head = head - 1;
      net.arcs.push_back(a);
    } else {
      fail("unknown line tag");
    }
  }
  if (!have_problem) throw InputError("DIMACS: missing problem line");
  if (net.arcs.size() != declared_arcs) throw InputError("DIMACS: arc count does not match header");
  return net;
}

}  // namespace wbp
