#include "wbp_app/commands.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "wbp/aibp.hpp"
#include "wbp/flow.hpp"
#include "wbp/ibp.hpp"
#include "wbp/lp_oracle.hpp"
#include "wbp/rounding.hpp"
#include "wbp/tu.hpp"
#include "wbp_app/bench.hpp"
#include "wbp_app/generator.hpp"
#include "wbp_app/problem_io.hpp"
#include "wbp_app/report.hpp"

namespace wbp::app {

namespace {

/// m above which the n = 2 route refuses the brute-force TU check without --allow-large.
constexpr std::size_t kHardnessMaxBruteM = 6;

struct SolveArgs {
  std::string alg;
  std::string input;
  std::string output;
  std::string csv;
  std::optional<double> epsilon;
  std::optional<double> eta;
  std::optional<double> eps_prime;
  std::uint64_t seed = 0;
  std::size_t check_every = 10;
  std::size_t max_iterations = 1'000'000;
  bool lp_reference = false;
};

struct GenArgs {
  GeneratorOptions gen;
  std::string metric = "euclidean";
  bool no_normalize = false;
  std::string output;
};

struct BenchArgs {
  GenArgs instance;
  std::string input;
  std::vector<double> etas;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  double eps_prime = 1e-3;
  std::size_t check_every = 10;
  std::size_t max_iterations = 1'000'000;
  std::size_t threads = 0;
  std::string csv_dir;
  std::string output;
};

struct HardnessArgs {
  std::size_t m = 0;
  std::size_t n = 0;
  std::string export_flow;
  std::string input;
  std::string json;
  std::uint64_t seed = 0;
  bool allow_large = false;
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
  } else {
    write_file(path, text);
  }
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const BarycenterProblem problem = load_problem(a.input);
  ReportExtras extras;
  extras.instance_hash = instance_hash(problem);
  SolveReport report;

  if (a.alg == "lp") {
    if (a.epsilon || a.eta || a.eps_prime) throw InputError("--alg lp takes no --epsilon/--eta/--eps-prime");
    const LpSolution sol = solve_lp_exact(problem);
    report.algorithm = "lp";
    report.seed = a.seed;
    report.iterations = sol.pivots;
    report.residue_history.push_back({sol.pivots, residue(problem, sol.plans.plans)});
    report.objective_history.push_back({sol.pivots, sol.value});
    extras.barycenter = sol.barycenter;
    extras.primal_value = sol.value;
    extras.lp_optimum = sol.value;
    emit(a.output, report_to_json(report, extras).dump(2), out);
    return exit_ok;
  }

  const bool accelerated = a.alg == "aibp";
  if (a.epsilon && (a.eta || a.eps_prime))
    throw InputError("give either --epsilon or --eta with --eps-prime, not both");
  if (!a.epsilon && !(a.eta && a.eps_prime)) throw InputError("--eta and --eps-prime are both required");

  // the problem the dual solver actually runs on (smoothed under --epsilon)
  std::optional<BarycenterProblem> solved;
  double eta = a.eta.value_or(0.0);
  if (a.epsilon) {
    extras.epsilon = *a.epsilon;
    if (const auto params = pipeline_parameters(problem, *a.epsilon)) {
      eta = params->eta;
      solved = problem.with_weights(smooth_weights(problem.weights(), params->eps_prime));
    }
  } else {
    solved = problem;
  }

  const bool want_trace = !a.csv.empty();
  std::optional<GapReference> ref;
  if (solved && (want_trace || a.lp_reference)) ref = choose_gap_reference(*solved);
  if (a.lp_reference && !(problem.m() * problem.n() * problem.n() <= kLpMaxVariables))
    throw SizeError("--lp-reference: m n^2 exceeds " + std::to_string(kLpMaxVariables));

  SolverOptions opts;
  opts.check_every = a.check_every;
  opts.max_iterations = a.max_iterations;
  opts.record_primal = want_trace && ref == GapReference::lp;

  int code = exit_ok;
  try {
    if (a.epsilon) {
      const BarycenterResult r = accelerated ? barycenter_aibp(problem, *a.epsilon, a.seed, opts)
                                             : barycenter_ibp(problem, *a.epsilon, opts);
      report = r.report;
      extras.barycenter = r.barycenter;
      extras.primal_value = r.primal_value;
    } else {
      const SolveResult r = accelerated ? aibp_solve(problem, eta, *a.eps_prime, a.seed, opts)
                                        : ibp_solve(problem, eta, *a.eps_prime, opts);
      report = r.report;
      const PlanStack rounded = round_plans(r.plans.plans, problem.weights(), problem.omega());
      extras.barycenter = *rounded.barycenter;
      extras.primal_value = primal_objective(problem, rounded.plans);
    }
  } catch (const NonConvergenceError& e) {
    err << "wbp: " << e.what() << '\n';
    report = e.report();
    extras.converged = false;
    const auto b = materialize_B(DualObjective(*solved, eta), e.state());
    const PlanStack rounded = round_plans(b, problem.weights(), problem.omega());
    extras.barycenter = *rounded.barycenter;
    extras.primal_value = primal_objective(problem, rounded.plans);
    code = exit_non_convergence;
  }
  if (!a.epsilon) report.seed = a.seed;

  if (a.lp_reference) extras.lp_optimum = solve_lp_exact(problem).value;
  if (ref) {
    extras.gap_reference = ref;
    if (*ref == GapReference::lp) {
      extras.gap_reference_value = solved->weights() == problem.weights() && extras.lp_optimum
                                       ? *extras.lp_optimum
                                       : solve_lp_exact(*solved).value;
    } else {
      extras.gap_reference_value = reference_dual_value(*solved, eta);
    }
  }
  if (want_trace) {
    if (!ref) throw InputError("--csv: the trivial instance has no trace");
    write_file(a.csv, trace_csv(report, *ref, *extras.gap_reference_value));
  }
  emit(a.output, report_to_json(report, extras).dump(2), out);
  return code;
}

int cmd_gen(GenArgs a, std::ostream& out) {
  a.gen.metric = parse_metric(a.metric);
  a.gen.normalize = !a.no_normalize;
  emit(a.output, problem_to_json(generate_problem(a.gen)).dump(), out);
  return exit_ok;
}

int cmd_bench(BenchArgs a, std::ostream& out) {
  std::optional<BarycenterProblem> problem;
  if (!a.input.empty()) {
    problem = load_problem(a.input);
  } else {
    a.instance.gen.metric = parse_metric(a.instance.metric);
    a.instance.gen.normalize = !a.instance.no_normalize;
    problem = generate_problem(a.instance.gen);
  }
  BenchOptions o;
  if (!a.etas.empty()) o.etas = a.etas;
  o.trials = a.trials;
  o.seed = a.seed;
  o.eps_prime = a.eps_prime;
  o.solver.check_every = a.check_every;
  o.solver.max_iterations = a.max_iterations;
  o.threads = a.threads;
  if (!a.csv_dir.empty()) o.csv_dir = a.csv_dir;
  const BenchResult result = run_bench(*problem, o);
  out << format_bench_table(result);
  if (!a.output.empty()) write_file(a.output, bench_to_json(result).dump(2));
  for (const BenchRow& row : result.rows)
    if (row.failures() > 0) return exit_non_convergence;
  return exit_ok;
}

int cmd_hardness(const HardnessArgs& a, std::ostream& out) {
  if (a.m < 2 || a.n < 2) throw InputError("hardness needs m >= 2 and n >= 2");
  Json doc = {{"m", a.m}, {"n", a.n}};
  const ConstraintMatrix A(a.m, a.n);
  out << "constraint matrix A(" << a.m << ", " << a.n << "): " << A.rows() << " x " << A.cols() << '\n';
  bool handled = false;

  if (a.n == 2) {
    if (a.m > kHardnessMaxBruteM && !a.allow_large)
      throw SizeError("brute-force TU check for m > " + std::to_string(kHardnessMaxBruteM) +
                      " needs --allow-large");
    const IntMatrix dense = A.dense();
    const ReducedMatrix reduced = reduce_rows_n2(dense, a.m);
    const bool certified = verify_reduction_certificates(dense, reduced);
    const TuVerdict brute = is_tu_bruteforce(reduced.matrix);
    std::optional<bool> ghc;
    if (static_cast<std::size_t>(reduced.matrix.rows()) <= 20)
      ghc = is_tu_ghc_full(reduced.matrix).totally_unimodular;
    out << "reduced matrix: " << reduced.matrix.rows() << " x " << reduced.matrix.cols() << ", "
        << reduced.removed.size() << " redundant rows removed\n";
    out << "removed rows are signed sums of kept rows: " << (certified ? "yes" : "no") << '\n';
    out << "brute-force determinant check: " << (brute.totally_unimodular ? "all minors in {-1,0,1}" : "failed")
        << '\n';
    out << "Ghouila-Houri check: " << (ghc ? (*ghc ? "every row subset partitions" : "failed") : "skipped")
        << '\n';
    const bool tu = certified && brute.totally_unimodular && ghc.value_or(true);
    out << "verdict: " << (tu ? "TU after row reduction" : "NOT TU after row reduction") << '\n';
    doc["reduction"] = {{"rows", reduced.matrix.rows()},
                        {"cols", reduced.matrix.cols()},
                        {"removed", reduced.removed},
                        {"certificates_hold", certified},
                        {"bruteforce_tu", brute.totally_unimodular},
                        {"ghouila_houri_tu", ghc ? Json(*ghc) : Json(nullptr)},
                        {"totally_unimodular", tu}};
    handled = true;
  }

  if (a.m == 2 && !a.export_flow.empty()) {
    std::optional<BarycenterProblem> problem;
    if (!a.input.empty()) {
      problem = load_problem(a.input);
      if (problem->n() != a.n) throw InputError("--input has a different n than --n");
    } else {
      GeneratorOptions g;
      g.m = 2;
      g.n = a.n;
      g.dim = 2;
      g.seed = a.seed;
      problem = generate_problem(g);
    }
    const FlowNetwork net = export_min_cost_flow(*problem);
    std::ofstream file(a.export_flow);
    if (!file) throw InputError("cannot write " + a.export_flow);
    write_dimacs(net, file);
    out << "min-cost flow network: " << net.nodes() << " nodes, " << net.arcs.size() << " arcs, written to "
        << a.export_flow << '\n';
    doc["flow"] = {{"nodes", net.nodes()}, {"arcs", net.arcs.size()}, {"file", a.export_flow}};
    handled = true;
  } else if (a.m == 2) {
    out << "m = 2: the problem is a min-cost flow over " << 3 * a.n << " nodes and " << 2 * a.n * a.n
        << " arcs (use --export-flow to write it)\n";
    handled = true;
  }

  if (a.m >= 3 && a.n >= 3) {
    const WitnessReport w = verify_non_tu_witness(a.m, a.n);
    out << w.to_text();
    doc["witness"] = witness_to_json(w);
    handled = true;
  }
  if (!handled) throw InputError("no hardness route for this (m, n)");
  if (!a.json.empty()) write_file(a.json, doc.dump(2));
  return exit_ok;
}

void add_gen_options(CLI::App* cmd, GenArgs& g) {
  cmd->add_option("--m", g.gen.m, "number of measures")->check(CLI::PositiveNumber);
  cmd->add_option("--n", g.gen.n, "support size")->check(CLI::PositiveNumber);
  cmd->add_option("--dim", g.gen.dim, "dimension of the support points")->check(CLI::PositiveNumber);
  cmd->add_option("--components", g.gen.components, "Gaussian mixture components")->check(CLI::PositiveNumber);
  cmd->add_option("--spread", g.gen.spread, "std of the component means")->check(CLI::NonNegativeNumber);
  cmd->add_option("--cov-scale", g.gen.cov_scale, "std within a component")->check(CLI::NonNegativeNumber);
  cmd->add_option("--p", g.gen.p, "cost exponent");
  cmd->add_option("--metric", g.metric, "euclidean, sqeuclidean or manhattan");
  cmd->add_flag("--no-normalize", g.no_normalize, "keep raw coordinates instead of scaling max cost to 1");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fixed-support Wasserstein barycenters: IBP, accelerated IBP, exact LP and hardness checks", "wbp"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "solve one instance and write a JSON report");
  s->add_option("--alg", solve.alg, "aibp, ibp or lp")->required()->check(CLI::IsMember({"aibp", "ibp", "lp"}));
  s->add_option("--input", solve.input, "problem JSON")->required();
  s->add_option("--output", solve.output, "report path (stdout when omitted)");
  s->add_option("--csv", solve.csv, "write an iter,gap,residue trace here");
  s->add_option("--epsilon", solve.epsilon, "target accuracy; runs the full smoothing/rounding pipeline");
  s->add_option("--eta", solve.eta, "entropic regularization for a direct run");
  s->add_option("--eps-prime", solve.eps_prime, "residue target for a direct run");
  s->add_option("--seed", solve.seed, "AIBP block-choice seed");
  s->add_option("--check-every", solve.check_every, "residue evaluation period")->check(CLI::PositiveNumber);
  s->add_option("--max-iterations", solve.max_iterations, "iteration cap");
  s->add_flag("--lp-reference", solve.lp_reference, "also report the exact LP optimum");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a Gaussian-mixture instance");
  add_gen_options(g, gen);
  g->add_option("--seed", gen.gen.seed, "generator seed");
  g->add_option("--output", gen.output, "problem path (stdout when omitted)");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "IBP vs AIBP over an eta grid");
  add_gen_options(b, bench.instance);
  b->add_option("--instance-seed", bench.instance.gen.seed, "generator seed when no --input is given");
  b->add_option("--input", bench.input, "problem JSON instead of a generated instance");
  b->add_option("--etas", bench.etas, "eta grid (default 0.1 0.05 0.01 0.005)")->delimiter(',');
  b->add_option("--trials", bench.trials, "trials per (eta, algorithm)")->check(CLI::PositiveNumber);
  b->add_option("--seed", bench.seed, "master seed; trial i uses splitmix64(seed + i)");
  b->add_option("--eps-prime", bench.eps_prime, "residue target");
  b->add_option("--check-every", bench.check_every, "residue evaluation period")->check(CLI::PositiveNumber);
  b->add_option("--max-iterations", bench.max_iterations, "iteration cap per trial");
  b->add_option("--threads", bench.threads, "parallel trials (default WBP_THREADS or all cores)");
  b->add_option("--csv-dir", bench.csv_dir, "write trial-0 traces here");
  b->add_option("--output", bench.output, "JSON summary path");

  HardnessArgs hard;
  auto* h = app.add_subcommand("hardness", "total unimodularity of the barycenter constraint matrix");
  h->add_option("--m", hard.m, "number of measures")->required();
  h->add_option("--n", hard.n, "support size")->required();
  h->add_option("--export-flow", hard.export_flow, "m = 2: write the min-cost flow network here");
  h->add_option("--input", hard.input, "m = 2: instance to export (generated when omitted)");
  h->add_option("--seed", hard.seed, "seed of the generated m = 2 instance");
  h->add_option("--json", hard.json, "structured report path");
  h->add_flag("--allow-large", hard.allow_large, "lift the size guard on the brute-force check");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "wbp: " << e.what() << '\n';
    return exit_bad_input;
  }

  try {
    if (*s) return cmd_solve(solve, out, err);
    if (*g) return cmd_gen(gen, out);
    if (*b) return cmd_bench(bench, out);
    if (*h) return cmd_hardness(hard, out);
  } catch (const SizeError& e) {
    err << "wbp: " << e.what() << '\n';
    return exit_size_guard;
  } catch (const NonConvergenceError& e) {
    err << "wbp: " << e.what() << '\n';
    return exit_non_convergence;
  } catch (const InputError& e) {
    err << "wbp: " << e.what() << '\n';
    return exit_bad_input;
  } catch (const DomainError& e) {
    err << "wbp: " << e.what() << '\n';
    return exit_bad_input;
  } catch (const UnsupportedError& e) {
    err << "wbp: " << e.what() << '\n';
    return exit_bad_input;
  } catch (const Json::exception& e) {
    err << "wbp: " << e.what() << '\n';
    return exit_bad_input;
  } catch (const std::exception& e) {
    err << "wbp: internal error: " << e.what() << '\n';
    return exit_internal;
  }
  return exit_bad_input;
}

}  // namespace wbp::app
