// Command-line front end: single traces, replication studies, theorem
// checks, standalone power-one test validation, and a wall-clock comparison
// against stochastic approximation. All randomness derives from the seed
// flags, and output files contain no timestamps, so a fixed invocation is
// byte-reproducible.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "probisect/harness.hpp"

namespace {

using namespace probisect;

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--gamma", cfg.gamma, "power-one confidence parameter");
  cmd->add_option("--update-p", cfg.update_p, "belief update probability");
  cmd->add_option("--macro-iters", cfg.macro_iters, "macro iterations to run");
  cmd->add_option("--max-queries", cfg.max_total_queries, "global query budget");
  cmd->add_option("--max-test-steps", cfg.max_test_steps, "per-test truncation cap");
  cmd->add_option("--renorm-every", cfg.renorm_every, "belief renormalization cadence");
}

int run_command(const std::string& problem, const std::string& algorithm, SolverConfig cfg,
                double epsilon, const std::string& out_path) {
  SolverTrace trace;
  double root = 0.0;
  if (algorithm == "pba_classical" || is_constant_p_spec(problem)) {
    const ConstantPOracle oracle = parse_constant_p(problem);
    root = oracle.root;
    trace = run_classical(oracle, cfg);
  } else {
    const Problem prob = parse_problem(problem);
    root = prob.root;
    trace = run_extended(prob, cfg);
  }
  auto os = open_out(out_path);
  write_trace_csv(os, trace, root, epsilon);
  std::cout << "records=" << trace.records.size() << " stalled=" << (trace.stalled ? 1 : 0)
            << " out=" << out_path << "\n";
  return 0;
}

int bench_command(ExperimentSpec spec, const std::string& out_path) {
  auto os = open_out(out_path);
  if (spec.algorithm == Algorithm::sa) {
    if (spec.sa.a <= 0.0) spec.sa.a = default_sa_gain(parse_problem(spec.problem));
    const auto curves = run_sa_replications(spec);
    write_sa_aggregate_csv(os, aggregate_sa(curves));
  } else {
    const auto runs = run_pba_replications(spec);
    std::size_t stalled = 0;
    for (const auto& r : runs) stalled += r.trace.stalled ? 1 : 0;
    write_aggregate_csv(os, aggregate_pba(runs, spec.estimator_epsilon));
    std::cout << "stalled=" << stalled << "/" << spec.reps << "\n";
  }
  std::cout << "out=" << out_path << "\n";
  return 0;
}

// Overrides for the per-check default specs; a field only applies when the
// corresponding flag was given.
struct CheckOverrides {
  std::optional<std::string> problem;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> base_seed;
  std::optional<bool> randomize_root;
  std::optional<unsigned> threads;
  std::optional<double> gamma;
  std::optional<double> update_p;
  std::optional<std::size_t> macro_iters;
  std::optional<std::uint64_t> max_test_steps;
  std::optional<std::uint64_t> max_total_queries;
};

int check_command(const std::string& which, const std::string& report_path,
                  const CheckOverrides& overrides, double thm3_epsilon) {
  std::vector<CheckResult> results;
  const auto apply_overrides = [&](ExperimentSpec spec) {
    if (overrides.problem) spec.problem = *overrides.problem;
    if (overrides.reps) spec.reps = *overrides.reps;
    if (overrides.base_seed) spec.base_seed = *overrides.base_seed;
    if (overrides.randomize_root) spec.randomize_root = *overrides.randomize_root;
    if (overrides.threads) spec.threads = *overrides.threads;
    if (overrides.gamma) spec.solver.gamma = *overrides.gamma;
    if (overrides.update_p) spec.solver.update_p = *overrides.update_p;
    if (overrides.macro_iters) spec.solver.macro_iters = *overrides.macro_iters;
    if (overrides.max_test_steps) spec.solver.max_test_steps = *overrides.max_test_steps;
    if (overrides.max_total_queries) spec.solver.max_total_queries = *overrides.max_total_queries;
    return spec;
  };
  const auto run_one = [&](const std::string& name) {
    try {
      if (name == "thm1") {
        results.push_back(check_theorem1(apply_overrides(thm1_default_spec())));
      } else if (name == "prop1") {
        results.push_back(check_prop1(apply_overrides(prop1_default_spec())));
      } else if (name == "prop2") {
        results.push_back(check_prop2(apply_overrides(prop2_default_spec())));
      } else if (name == "thm3") {
        results.push_back(check_theorem3(apply_overrides(thm3_default_spec()), thm3_epsilon));
      } else {
        throw std::invalid_argument("unknown check: " + name);
      }
    } catch (const std::runtime_error& e) {
      CheckResult res;
      res.name = name;
      res.pass = false;
      res.detail = std::string("error: ") + e.what();
      results.push_back(res);
    }
  };
  if (which == "all") {
    for (const char* name : {"thm1", "prop1", "prop2", "thm3"}) run_one(name);
  } else {
    run_one(which);
  }
  auto os = open_out(report_path);
  write_report(os, results);
  write_report(std::cout, results);
  bool all_pass = true;
  for (const auto& r : results)
    if (r.judged && !r.pass) all_pass = false;
  return all_pass ? 0 : 1;
}

int powerone_command(double gamma, double drift_p, std::size_t reps, std::uint64_t max_steps,
                     std::uint64_t seed, const std::string& out_path) {
  const auto est = estimate_error_probability(drift_p, gamma, reps, max_steps, seed);
  std::cout << "stop_fraction=" << fmt17(est.stop_fraction)
            << " wrong_sign_fraction=" << fmt17(est.wrong_sign_fraction) << "\n";
  if (!out_path.empty()) {
    // One (decision, runlength) pair per replication, re-simulated with the
    // same seed so the summary above and the pairs agree.
    auto os = open_out(out_path);
    os << "decision,runlength\n";
    Rng rng(seed);
    const TestBoundary b{gamma, max_steps};
    for (std::size_t r = 0; r < reps; ++r) {
      const TestOutcome out = run_test([&] { return rng.uniform01() < drift_p ? +1 : -1; }, b);
      os << static_cast<int>(out.decision) << ',' << out.runlength << '\n';
    }
  }
  return 0;
}

int compare_command(ExperimentSpec pba_spec, double sa_a, std::uint64_t sa_iters,
                    const std::string& out_path) {
  ExperimentSpec sa_spec = pba_spec;
  sa_spec.algorithm = Algorithm::sa;
  sa_spec.sa.a = sa_a > 0.0 ? sa_a : default_sa_gain(parse_problem(pba_spec.problem));
  sa_spec.sa.iters = sa_iters;
  const auto rows = compare_sa(pba_spec, sa_spec);
  auto os = open_out(out_path);
  write_compare_csv(os, rows);
  std::cout << "rows=" << rows.size() << " sa_gain=" << fmt17(sa_spec.sa.a)
            << " out=" << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probisect: stochastic root finding by probabilistic bisection"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "single solver trace to CSV");
  std::string run_problem = "shape=linear,c=1.0,root=0.31;noise=gaussian,sigma=1.0";
  std::string run_algorithm = "pba_extended";
  SolverConfig run_cfg;
  double run_epsilon = 0.1;
  std::string run_out = "trace.csv";
  run->add_option("--problem", run_problem, "problem spec string");
  run->add_option("--algorithm", run_algorithm, "pba_extended or pba_classical")
      ->check(CLI::IsMember({"pba_extended", "pba_classical"}));
  add_solver_flags(run, run_cfg);
  run->add_option("--seed", run_cfg.seed, "RNG seed");
  run->add_option("--estimator-epsilon", run_epsilon, "epsilon for the weighted estimator column");
  run->add_option("--out", run_out, "output CSV path");

  // bench
  auto* bench = app.add_subcommand("bench", "replication study, aggregated CSV");
  ExperimentSpec bench_spec;
  bench_spec.problem = run_problem;
  std::string bench_algorithm = "pba_extended";
  std::string bench_out = "bench.csv";
  bench->add_option("--problem", bench_spec.problem, "problem spec string");
  bench->add_option("--algorithm", bench_algorithm, "pba_extended, pba_classical, or sa")
      ->check(CLI::IsMember({"pba_extended", "pba_classical", "sa"}));
  add_solver_flags(bench, bench_spec.solver);
  bench->add_option("--reps", bench_spec.reps, "independent replications");
  bench->add_option("--base-seed", bench_spec.base_seed, "seed of replication 0");
  bench->add_option("--randomize-root", bench_spec.randomize_root,
                    "draw x* ~ U(0.05,0.95) per replication");
  bench->add_option("--estimator-epsilon", bench_spec.estimator_epsilon,
                    "epsilon for the weighted estimator");
  bench->add_option("--threads", bench_spec.threads, "worker threads (0 = auto)");
  bench_spec.sa.a = 0.0;
  bench_spec.sa.iters = 100'000;
  bench->add_option("--sa-a", bench_spec.sa.a, "SA gain numerator (0 = 2/c for linear, else 2)");
  bench->add_option("--sa-iters", bench_spec.sa.iters, "SA iterations (sa algorithm)");
  bench->add_option("--out", bench_out, "output CSV path");

  // check
  auto* check = app.add_subcommand("check", "theorem check suites, report + exit code");
  std::string check_which = "all";
  std::string check_report = "report.txt";
  double thm3_epsilon = 0.1;
  CheckOverrides check_overrides;
  check->add_option("--which", check_which, "thm1, prop1, prop2, thm3, or all")
      ->check(CLI::IsMember({"thm1", "prop1", "prop2", "thm3", "all"}));
  check->add_option("--report", check_report, "report output path");
  check->add_option("--problem", check_overrides.problem, "override problem spec");
  check->add_option("--reps", check_overrides.reps, "override replications");
  check->add_option("--base-seed", check_overrides.base_seed, "seed of replication 0");
  check->add_option("--randomize-root", check_overrides.randomize_root,
                    "draw x* per replication");
  check->add_option("--threads", check_overrides.threads, "worker threads (0 = auto)");
  check->add_option("--gamma", check_overrides.gamma, "override gamma");
  check->add_option("--update-p", check_overrides.update_p, "override update p");
  check->add_option("--macro-iters", check_overrides.macro_iters, "override macro iterations");
  check->add_option("--max-test-steps", check_overrides.max_test_steps, "override per-test cap");
  check->add_option("--max-queries", check_overrides.max_total_queries, "override query budget");
  check->add_option("--estimator-epsilon", thm3_epsilon, "epsilon for the thm3 statistic");

  // powerone
  auto* powerone = app.add_subcommand("powerone", "standalone power-one test validation");
  double po_gamma = 0.2, po_drift = 0.5;
  std::size_t po_reps = 2000;
  std::uint64_t po_max_steps = 100'000, po_seed = 20240901;
  std::string po_out;
  powerone->add_option("--gamma", po_gamma, "confidence parameter");
  powerone->add_option("--drift-p", po_drift, "P(+1) of the simulated sign stream");
  powerone->add_option("--reps", po_reps, "replications");
  powerone->add_option("--max-steps", po_max_steps, "truncation cap");
  powerone->add_option("--seed", po_seed, "RNG seed");
  powerone->add_option("--out", po_out, "optional CSV of (decision, runlength) pairs");

  // compare
  auto* compare = app.add_subcommand("compare", "PBA vs stochastic approximation");
  ExperimentSpec cmp_spec;
  cmp_spec.problem = run_problem;
  double cmp_sa_a = 0.0;  // 0 = derive from the shape
  std::uint64_t cmp_sa_iters = 100'000;
  std::string cmp_out = "compare.csv";
  compare->add_option("--problem", cmp_spec.problem, "problem spec string");
  add_solver_flags(compare, cmp_spec.solver);
  compare->add_option("--reps", cmp_spec.reps, "independent replications");
  compare->add_option("--base-seed", cmp_spec.base_seed, "seed of replication 0");
  compare->add_option("--randomize-root", cmp_spec.randomize_root, "draw x* per replication");
  compare->add_option("--estimator-epsilon", cmp_spec.estimator_epsilon,
                      "epsilon for the weighted estimator");
  compare->add_option("--threads", cmp_spec.threads, "worker threads (0 = auto)");
  compare->add_option("--sa-a", cmp_sa_a, "SA gain numerator (0 = 2/c for linear, else 2)");
  compare->add_option("--sa-iters", cmp_sa_iters, "SA iterations");
  compare->add_option("--out", cmp_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_problem, run_algorithm, run_cfg, run_epsilon, run_out);
    if (bench->parsed()) {
      bench_spec.algorithm = bench_algorithm == "sa"
                                 ? Algorithm::sa
                                 : (bench_algorithm == "pba_classical" ? Algorithm::pba_classical
                                                                       : Algorithm::pba_extended);
      if (bench_spec.algorithm != Algorithm::sa && is_constant_p_spec(bench_spec.problem))
        bench_spec.algorithm = Algorithm::pba_classical;
      return bench_command(bench_spec, bench_out);
    }
    if (check->parsed()) return check_command(check_which, check_report, check_overrides, thm3_epsilon);
    if (powerone->parsed())
      return powerone_command(po_gamma, po_drift, po_reps, po_max_steps, po_seed, po_out);
    if (compare->parsed()) return compare_command(cmp_spec, cmp_sa_a, cmp_sa_iters, cmp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
