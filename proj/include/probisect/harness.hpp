#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "probisect/oracle.hpp"
#include "probisect/rng.hpp"
#include "probisect/solver.hpp"
#include "probisect/stochastic_approximation.hpp"

namespace probisect {

// PASS thresholds for the theorem checks. Chosen loose enough to be
// seed-robust at the default replication counts; echoed in report headers.
inline constexpr double kMinRSquared = 0.8;
inline constexpr double kGrowthMinRatio = 2.0;      // tightness-violation statistic
inline constexpr double kTightnessMaxRatio = 3.0;   // weighted-estimator statistic
inline constexpr std::size_t kFitBurnIn = 20;       // early iterations track the prior

inline std::string fmt17(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

// --- least-squares rate extraction -------------------------------------------

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  std::size_t dropped = 0;  // nonpositive errors excluded from the fit
};

// OLS of ln(err) against x (or ln(x) when log_x). Nonpositive errors are
// dropped and counted; fewer than three usable points is an error.
inline RateFit fit_log_rate(const std::vector<double>& xs, const std::vector<double>& errs,
                            bool log_x) {
  if (xs.size() != errs.size()) throw std::invalid_argument("fit_log_rate: length mismatch");
  std::vector<double> u, v;
  u.reserve(xs.size());
  v.reserve(xs.size());
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(errs[i] > 0.0) || !std::isfinite(errs[i])) {
      ++dropped;
      continue;
    }
    if (!(xs[i] > 0.0)) throw std::invalid_argument("fit_log_rate: xs must be positive");
    u.push_back(log_x ? std::log(xs[i]) : xs[i]);
    v.push_back(std::log(errs[i]));
  }
  if (u.size() < 3) throw std::invalid_argument("fit_log_rate: fewer than 3 usable points");
  const double n = static_cast<double>(u.size());
  double um = 0.0, vm = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    um += u[i];
    vm += v[i];
  }
  um /= n;
  vm /= n;
  double suu = 0.0, svv = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double du = u[i] - um;
    const double dv = v[i] - vm;
    suu += du * du;
    svv += dv * dv;
    suv += du * dv;
  }
  if (!(suu > 0.0)) throw std::invalid_argument("fit_log_rate: degenerate x values");
  RateFit fit;
  fit.slope = suv / suu;
  fit.intercept = vm - fit.slope * um;
  fit.r_squared = (svv > 0.0) ? (suv * suv) / (suu * svv) : 1.0;
  fit.n_points = u.size();
  fit.dropped = dropped;
  return fit;
}

// --- replication driver -------------------------------------------------------

enum class Algorithm { pba_classical, pba_extended, sa };

struct ExperimentSpec {
  std::string problem;  // problem spec string, see oracle.hpp
  Algorithm algorithm = Algorithm::pba_extended;
  SolverConfig solver;
  SAConfig sa;
  std::size_t reps = 1;
  std::uint64_t base_seed = 20240901;
  bool randomize_root = true;  // x* ~ Uniform(0.05, 0.95) per replication
  double estimator_epsilon = 0.1;
  unsigned threads = 0;  // 0 = hardware concurrency
};

namespace detail {

inline unsigned resolve_threads(unsigned requested, std::size_t jobs) {
  unsigned t = requested;
  if (t == 0) {
    t = std::thread::hardware_concurrency();
    if (t == 0) t = 1;
  }
  if (static_cast<std::size_t>(t) > jobs) t = static_cast<unsigned>(jobs);
  return std::max(1u, t);
}

// Index-parallel loop. Each job owns its slot, so results are identical for
// any thread count; aggregation downstream always walks indices in order.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  if (count == 0) return;
  threads = resolve_threads(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline double draw_root(Rng& rng) { return 0.05 + 0.9 * rng.uniform01(); }

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Nearest-rank percentile, q in (0,1].
inline double percentile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return v[rank - 1];
}

}  // namespace detail

struct RepRun {
  double root = 0.0;
  SolverTrace trace;
};

// Runs `reps` independent solver replications with seeds base_seed + i.
// The per-replication root draw consumes the first uniform of that
// replication's stream, so results do not depend on execution order.
inline std::vector<RepRun> run_pba_replications(const ExperimentSpec& spec) {
  if (spec.reps < 1) throw std::invalid_argument("run_pba_replications: reps must be >= 1");
  if (spec.algorithm == Algorithm::sa)
    throw std::invalid_argument("run_pba_replications: spec selects the sa algorithm");
  const bool classical = spec.algorithm == Algorithm::pba_classical;
  // Parse up front so malformed specs fail before any work is scheduled.
  Problem base_problem;
  double constp_root = 0.0, constp_p = 0.0;
  if (classical) {
    const ConstantPOracle o = parse_constant_p(spec.problem);
    constp_root = o.root;
    constp_p = o.p;
  } else {
    base_problem = parse_problem(spec.problem);
  }

  std::vector<RepRun> out(spec.reps);
  detail::parallel_for(spec.reps, spec.threads, [&](std::size_t i) {
    Rng rng(spec.base_seed + i);
    if (classical) {
      const double root = spec.randomize_root ? detail::draw_root(rng) : constp_root;
      const ConstantPOracle oracle(root, constp_p);
      out[i] = RepRun{root, run_classical(oracle, spec.solver, rng)};
    } else {
      Problem prob = base_problem;
      if (spec.randomize_root) prob.root = detail::draw_root(rng);
      out[i] = RepRun{prob.root, run_extended(prob, spec.solver, rng)};
    }
  });
  return out;
}

struct SaRepCurve {
  double root = 0.0;
  std::vector<std::pair<std::uint64_t, double>> err_at;  // (t, |x_t - root|) on a log grid
};

inline std::vector<SaRepCurve> run_sa_replications(const ExperimentSpec& spec) {
  if (spec.reps < 1) throw std::invalid_argument("run_sa_replications: reps must be >= 1");
  const Problem base_problem = parse_problem(spec.problem);
  std::vector<SaRepCurve> out(spec.reps);
  detail::parallel_for(spec.reps, spec.threads, [&](std::size_t i) {
    Rng rng(spec.base_seed + i);
    Problem prob = base_problem;
    if (spec.randomize_root) prob.root = detail::draw_root(rng);
    const auto series = run_sa(prob, spec.sa, rng);
    SaRepCurve curve;
    curve.root = prob.root;
    for (std::uint64_t t = 1; t < series.size(); t *= 2)
      curve.err_at.emplace_back(t, std::abs(series[t].x - prob.root));
    const std::uint64_t last = spec.sa.iters;
    if (last >= 1 && (curve.err_at.empty() || curve.err_at.back().first != last))
      curve.err_at.emplace_back(last, std::abs(series[last].x - prob.root));
    out[i] = std::move(curve);
  });
  return out;
}

// --- aggregation ---------------------------------------------------------------

struct AggregateRow {
  std::size_t n = 0;
  std::size_t reps_present = 0;
  double mean_t = 0.0;
  double geo_err_median = 0.0;
  double geo_err_wavg = 0.0;
  double geo_err_pavg = 0.0;
  std::size_t zero_drops = 0;  // exact-zero errors excluded from the geometric means
};

// Geometric-mean error per macro iteration across the replications that
// reached it. Zero errors cannot enter a log average; they are dropped and
// counted (in double precision they almost never occur).
inline std::vector<AggregateRow> aggregate_pba(const std::vector<RepRun>& runs, double epsilon) {
  std::size_t max_len = 0;
  for (const auto& r : runs) max_len = std::max(max_len, r.trace.records.size());
  std::vector<AggregateRow> rows(max_len);
  std::vector<std::array<double, 3>> log_sums(max_len, {0.0, 0.0, 0.0});
  std::vector<std::array<std::size_t, 3>> log_counts(max_len, {0, 0, 0});
  for (std::size_t i = 0; i < max_len; ++i) rows[i].n = i;

  for (const auto& run : runs) {
    const PrefixEstimates est = prefix_estimates(run.trace, epsilon);
    for (std::size_t n = 0; n < run.trace.records.size(); ++n) {
      auto& row = rows[n];
      ++row.reps_present;
      row.mean_t += static_cast<double>(run.trace.records[n].total_queries);
      const double errs[3] = {std::abs(est.median_est[n] - run.root),
                              std::abs(est.wavg_est[n] - run.root),
                              std::abs(est.pavg_est[n] - run.root)};
      for (int k = 0; k < 3; ++k) {
        if (errs[k] > 0.0) {
          log_sums[n][k] += std::log(errs[k]);
          ++log_counts[n][k];
        } else {
          ++row.zero_drops;
        }
      }
    }
  }
  for (std::size_t n = 0; n < max_len; ++n) {
    auto& row = rows[n];
    if (row.reps_present == 0) continue;
    row.mean_t /= static_cast<double>(row.reps_present);
    const auto geo = [&](int k) {
      return log_counts[n][k] == 0
                 ? 0.0
                 : std::exp(log_sums[n][k] / static_cast<double>(log_counts[n][k]));
    };
    row.geo_err_median = geo(0);
    row.geo_err_wavg = geo(1);
    row.geo_err_pavg = geo(2);
  }
  return rows;
}

struct SaAggregateRow {
  std::uint64_t t = 0;
  std::size_t reps_present = 0;
  double mean_err = 0.0;
  double geo_err = 0.0;
  std::size_t zero_drops = 0;
};

inline std::vector<SaAggregateRow> aggregate_sa(const std::vector<SaRepCurve>& curves) {
  std::vector<std::uint64_t> grid;
  for (const auto& c : curves)
    for (const auto& [t, e] : c.err_at) grid.push_back(t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<SaAggregateRow> rows;
  rows.reserve(grid.size());
  for (const std::uint64_t t : grid) {
    SaAggregateRow row;
    row.t = t;
    double log_sum = 0.0;
    std::size_t log_count = 0;
    for (const auto& c : curves) {
      const auto it = std::find_if(c.err_at.begin(), c.err_at.end(),
                                   [&](const auto& pr) { return pr.first == t; });
      if (it == c.err_at.end()) continue;
      ++row.reps_present;
      row.mean_err += it->second;
      if (it->second > 0.0) {
        log_sum += std::log(it->second);
        ++log_count;
      } else {
        ++row.zero_drops;
      }
    }
    if (row.reps_present > 0) {
      row.mean_err /= static_cast<double>(row.reps_present);
      row.geo_err = log_count == 0 ? 0.0 : std::exp(log_sum / static_cast<double>(log_count));
    }
    rows.push_back(row);
  }
  return rows;
}

// --- theorem checks -------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  bool judged = true;  // false = out-of-hypothesis report, excluded from gating
  std::string detail;
  RateFit fit{};
  bool has_fit = false;
};

namespace detail {

inline std::size_t stalled_count(const std::vector<RepRun>& runs) {
  std::size_t s = 0;
  for (const auto& r : runs) s += r.trace.stalled ? 1 : 0;
  return s;
}

// Rows usable for a rate fit: past burn-in, with at least half the
// replications still alive, and a positive geometric-mean error.
inline void fit_rows(const std::vector<AggregateRow>& agg, std::size_t reps, bool x_is_time,
                     std::vector<double>& xs, std::vector<double>& errs) {
  const std::size_t need = std::max<std::size_t>(1, (reps + 1) / 2);
  for (const auto& row : agg) {
    if (row.n < kFitBurnIn) continue;
    if (row.reps_present < need) continue;
    if (!(row.geo_err_median > 0.0)) continue;
    xs.push_back(x_is_time ? row.mean_t : static_cast<double>(row.n));
    errs.push_back(row.geo_err_median);
  }
}

inline ShapeKind spec_shape(const ExperimentSpec& spec) {
  return parse_problem(spec.problem).shape.kind;
}

}  // namespace detail

// Exponential decay of the median-point error in macro time: fits
// ln(geo-mean |X_n - x*|) against n past burn-in.
inline CheckResult check_theorem1(const ExperimentSpec& spec) {
  if (spec.solver.macro_iters < kFitBurnIn + 3)
    throw std::invalid_argument("check_theorem1: macro_iters leaves fewer than 3 points after burn-in");
  const auto runs = run_pba_replications(spec);
  const auto agg = aggregate_pba(runs, spec.estimator_epsilon);
  std::vector<double> xs, errs;
  detail::fit_rows(agg, spec.reps, /*x_is_time=*/false, xs, errs);
  if (xs.size() < 3) {
    // No usable data past burn-in. Report the decay over the iterations that
    // were reached, so the failure message still shows the observed rate.
    std::string msg = "check_theorem1: insufficient non-stalled replications in the burn-in "
                      "window [" + std::to_string(kFitBurnIn) + ", " +
                      std::to_string(spec.solver.macro_iters) + ")";
    std::vector<double> all_xs, all_errs;
    for (const auto& row : agg) {
      if (row.reps_present == 0 || !(row.geo_err_median > 0.0)) continue;
      all_xs.push_back(static_cast<double>(row.n) + 1.0);
      all_errs.push_back(row.geo_err_median);
    }
    if (all_xs.size() >= 3) {
      const RateFit f = fit_log_rate(all_xs, all_errs, false);
      msg += "; max macro index reached " + std::to_string(agg.size() - 1) +
             ", fit over the reached window: slope=" + fmt17(f.slope) +
             " r2=" + fmt17(f.r_squared);
    }
    throw std::runtime_error(msg);
  }
  CheckResult res;
  res.name = "thm1";
  res.fit = fit_log_rate(xs, errs, /*log_x=*/false);
  res.has_fit = true;
  res.pass = res.fit.slope < 0.0 && res.fit.r_squared >= kMinRSquared;
  res.detail = "slope=" + fmt17(res.fit.slope) + " r2=" + fmt17(res.fit.r_squared) +
               " points=" + std::to_string(res.fit.n_points) +
               " stalled=" + std::to_string(detail::stalled_count(runs)) + "/" +
               std::to_string(spec.reps);
  return res;
}

// Exponential decay in wall-clock time, which needs the correctness
// probability bounded away from 1/2; the step shape provides that.
inline CheckResult check_prop1(const ExperimentSpec& spec) {
  if (detail::spec_shape(spec) != ShapeKind::step)
    throw std::invalid_argument("check_prop1: problem must use the step shape");
  if (spec.solver.macro_iters < kFitBurnIn + 3)
    throw std::invalid_argument("check_prop1: macro_iters leaves fewer than 3 points after burn-in");
  const auto runs = run_pba_replications(spec);
  const auto agg = aggregate_pba(runs, spec.estimator_epsilon);
  std::vector<double> xs, errs;
  detail::fit_rows(agg, spec.reps, /*x_is_time=*/true, xs, errs);
  if (xs.size() < 3)
    throw std::runtime_error("check_prop1: insufficient non-stalled replications for the fit");
  CheckResult res;
  res.name = "prop1";
  res.fit = fit_log_rate(xs, errs, /*log_x=*/false);
  res.has_fit = true;
  res.pass = res.fit.slope < 0.0 && res.fit.r_squared >= kMinRSquared;
  res.detail = "slope=" + fmt17(res.fit.slope) + " r2=" + fmt17(res.fit.r_squared) +
               " points=" + std::to_string(res.fit.n_points) +
               " stalled=" + std::to_string(detail::stalled_count(runs)) + "/" +
               std::to_string(spec.reps);
  return res;
}

namespace detail {

// Per-replication statistic values at the requested checkpoints; a
// replication contributes only to checkpoints its trace reached.
template <class Stat>
std::vector<std::vector<double>> checkpoint_values(const std::vector<RepRun>& runs,
                                                   const std::vector<std::size_t>& checkpoints,
                                                   Stat&& stat) {
  std::vector<std::vector<double>> values(checkpoints.size());
  for (const auto& run : runs) {
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      double v = 0.0;
      if (stat(run, checkpoints[c], v)) values[c].push_back(v);
    }
  }
  return values;
}

inline void require_coverage(const std::vector<std::vector<double>>& values,
                             const std::vector<std::size_t>& checkpoints, std::size_t reps,
                             const char* who) {
  const std::size_t need = std::max<std::size_t>(3, (reps + 1) / 2);
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    if (values[c].size() < need)
      throw std::runtime_error(std::string(who) + ": only " + std::to_string(values[c].size()) +
                               " replications reached checkpoint n=" +
                               std::to_string(checkpoints[c]));
  }
}

}  // namespace detail

// Growth of sqrt(T_n) * |X_n - x*| across checkpoints: the statistic escapes
// any fixed bound under the linear-shape hypothesis. Judged only for the
// linear shape; other shapes produce a report without a verdict.
inline CheckResult check_prop2(const ExperimentSpec& spec,
                               const std::vector<std::size_t>& checkpoints = {25, 50, 100, 200}) {
  if (checkpoints.size() < 2)
    throw std::invalid_argument("check_prop2: need at least two checkpoints");
  const bool in_hypothesis = detail::spec_shape(spec) == ShapeKind::linear;
  const auto runs = run_pba_replications(spec);
  const auto values = detail::checkpoint_values(
      runs, checkpoints, [](const RepRun& run, std::size_t cp, double& out) {
        if (run.trace.records.size() <= cp) return false;
        const auto& rec = run.trace.records[cp];
        out = std::sqrt(static_cast<double>(rec.total_queries)) * std::abs(rec.x - run.root);
        return true;
      });
  detail::require_coverage(values, checkpoints, spec.reps, "check_prop2");

  std::vector<double> medians;
  medians.reserve(checkpoints.size());
  for (const auto& v : values) medians.push_back(detail::median_of(v));
  bool nondecreasing = true;
  for (std::size_t c = 0; c + 1 < medians.size(); ++c)
    if (medians[c + 1] < medians[c]) nondecreasing = false;
  const double ratio = medians.back() / medians.front();

  CheckResult res;
  res.name = "prop2";
  res.judged = in_hypothesis;
  res.pass = !in_hypothesis || (nondecreasing && ratio > kGrowthMinRatio);
  std::string med_list;
  for (std::size_t c = 0; c < checkpoints.size(); ++c)
    med_list += (c ? " " : "") + std::string("W") + std::to_string(checkpoints[c]) + "=" +
                fmt17(medians[c]);
  res.detail = med_list + " ratio=" + fmt17(ratio) +
               " stalled=" + std::to_string(detail::stalled_count(runs)) + "/" +
               std::to_string(spec.reps) + (in_hypothesis ? "" : " (report only: shape outside hypothesis)");
  return res;
}

// Non-explosion of |X^(eps)_n - x*| * T_{n-1}^(1/2-eps): the 90th percentile
// at the last checkpoint must stay within a factor of its value at the
// second checkpoint.
inline CheckResult check_theorem3(const ExperimentSpec& spec, double epsilon,
                                  const std::vector<std::size_t>& checkpoints = {25, 50, 100,
                                                                                 200}) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("check_theorem3: epsilon must lie in (0,1/2)");
  if (checkpoints.size() < 2)
    throw std::invalid_argument("check_theorem3: need at least two checkpoints");
  if (detail::spec_shape(spec) != ShapeKind::linear)
    throw std::invalid_argument("check_theorem3: problem must use the linear shape");
  const auto runs = run_pba_replications(spec);

  // Weighted prefix estimates, one pass per replication.
  std::vector<PrefixEstimates> prefixes;
  prefixes.reserve(runs.size());
  for (const auto& run : runs) prefixes.push_back(prefix_estimates(run.trace, epsilon));

  const double exponent = 0.5 - epsilon;
  std::vector<std::vector<double>> values(checkpoints.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      const std::size_t cp = checkpoints[c];
      if (runs[i].trace.records.size() < cp || cp == 0) continue;
      const double est = prefixes[i].wavg_est[cp - 1];
      const double t_prev = static_cast<double>(runs[i].trace.records[cp - 1].total_queries);
      values[c].push_back(std::abs(est - runs[i].root) * std::pow(t_prev, exponent));
    }
  }
  detail::require_coverage(values, checkpoints, spec.reps, "check_theorem3");

  std::vector<double> p90s;
  p90s.reserve(checkpoints.size());
  for (const auto& v : values) p90s.push_back(detail::percentile_of(v, 0.9));
  const double ratio = p90s.back() / p90s[1];

  CheckResult res;
  res.name = "thm3";
  res.pass = ratio <= kTightnessMaxRatio;
  std::string p90_list;
  for (std::size_t c = 0; c < checkpoints.size(); ++c)
    p90_list += (c ? " " : "") + std::string("V") + std::to_string(checkpoints[c]) + "=" +
                fmt17(p90s[c]);
  res.detail = p90_list + " ratio=" + fmt17(ratio) + " epsilon=" + fmt17(epsilon) +
               " stalled=" + std::to_string(detail::stalled_count(runs)) + "/" +
               std::to_string(spec.reps);
  return res;
}

// Log-log rate fit of the stochastic-approximation baseline over a time
// window, using arithmetic mean errors across replications.
inline RateFit fit_sa_loglog(const ExperimentSpec& spec, std::uint64_t t_min, std::uint64_t t_max) {
  const auto curves = run_sa_replications(spec);
  const auto agg = aggregate_sa(curves);
  std::vector<double> xs, errs;
  for (const auto& row : agg) {
    if (row.t < t_min || row.t > t_max) continue;
    if (row.reps_present < spec.reps) continue;
    xs.push_back(static_cast<double>(row.t));
    errs.push_back(row.mean_err);
  }
  return fit_log_rate(xs, errs, /*log_x=*/true);
}

// Default experiment configurations for the theorem checks, shared by the
// CLI and the acceptance suite. Problems and budgets are matched to each
// result's hypothesis.

inline ExperimentSpec thm1_default_spec() {
  ExperimentSpec spec;
  spec.problem = "shape=linear,c=1.0,root=0.31;noise=gaussian,sigma=1.0";
  spec.reps = 20;
  spec.solver.gamma = 0.2;
  spec.solver.update_p = 0.7;
  spec.solver.macro_iters = 200;
  spec.solver.max_test_steps = 30'000'000;
  spec.solver.max_total_queries = 1'000'000'000;
  return spec;
}

inline ExperimentSpec prop1_default_spec() {
  ExperimentSpec spec;
  spec.problem = "shape=step,h=1.0,root=0.31;noise=gaussian,sigma=1.0";
  spec.reps = 20;
  spec.solver.gamma = 0.2;
  spec.solver.update_p = 0.7;
  // error reaches ~1e-13 by n = 80; longer runs would push the belief into
  // the double-resolution floor
  spec.solver.macro_iters = 80;
  spec.solver.max_test_steps = 1'000'000;
  spec.solver.max_total_queries = 100'000'000;
  return spec;
}

// The growth and tightness checkpoints extend to n = 200, which is only
// reachable while the query points are still in transit toward the root:
// once they arrive, per-test runlengths scale like the inverse square of
// the remaining distance and any feasible step cap is exceeded within a few
// iterations. A fixed far root and an update probability barely above 1/2
// keep all 200 checkpoints inside the transit window.
inline ExperimentSpec prop2_default_spec() {
  ExperimentSpec spec;
  spec.problem = "shape=linear,c=1.0,root=0.93;noise=gaussian,sigma=1.0";
  spec.reps = 50;
  spec.randomize_root = false;
  spec.solver.gamma = 0.2;
  spec.solver.update_p = 0.5013;
  spec.solver.macro_iters = 201;
  spec.solver.max_test_steps = 10'000'000;
  spec.solver.max_total_queries = 4'000'000'000;
  return spec;
}

inline ExperimentSpec thm3_default_spec() {
  ExperimentSpec spec = prop2_default_spec();
  spec.solver.update_p = 0.503;
  return spec;
}

// --- wall-clock comparison -------------------------------------------------------

struct CompareRow {
  std::uint64_t queries = 0;
  double pba_err_median = 0.0;
  double pba_err_wavg = 0.0;
  double pba_err_pavg = 0.0;
  double sa_err = 0.0;
  bool pba_present = false;
  bool sa_present = false;
};

// Geometric-mean error against query count on a shared power-of-two grid.
// Within each replication the latest value with T <= q is carried forward.
inline std::vector<CompareRow> compare_sa(const ExperimentSpec& pba_spec,
                                          const ExperimentSpec& sa_spec) {
  if (detail::spec_shape(pba_spec) != detail::spec_shape(sa_spec))
    throw std::invalid_argument("compare_sa: both specs must use the same problem family");
  const auto runs = run_pba_replications(pba_spec);
  const auto curves = run_sa_replications(sa_spec);

  std::uint64_t q_max = sa_spec.sa.iters;
  for (const auto& run : runs)
    if (!run.trace.records.empty())
      q_max = std::max(q_max, run.trace.records.back().total_queries);

  std::vector<PrefixEstimates> prefixes;
  prefixes.reserve(runs.size());
  for (const auto& run : runs)
    prefixes.push_back(prefix_estimates(run.trace, pba_spec.estimator_epsilon));

  std::vector<CompareRow> rows;
  for (std::uint64_t q = 1; q > 0 && q <= q_max; q *= 2) {
    CompareRow row;
    row.queries = q;
    double log_sum[3] = {0.0, 0.0, 0.0};
    std::size_t cnt[3] = {0, 0, 0};
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& recs = runs[i].trace.records;
      // latest record with total_queries <= q
      std::size_t k = recs.size();
      while (k > 0 && recs[k - 1].total_queries > q) --k;
      if (k == 0) continue;
      const double errs[3] = {std::abs(prefixes[i].median_est[k - 1] - runs[i].root),
                              std::abs(prefixes[i].wavg_est[k - 1] - runs[i].root),
                              std::abs(prefixes[i].pavg_est[k - 1] - runs[i].root)};
      for (int e = 0; e < 3; ++e) {
        if (errs[e] > 0.0) {
          log_sum[e] += std::log(errs[e]);
          ++cnt[e];
        }
      }
    }
    if (cnt[0] > 0) {
      row.pba_present = true;
      row.pba_err_median = std::exp(log_sum[0] / static_cast<double>(cnt[0]));
      row.pba_err_wavg = cnt[1] ? std::exp(log_sum[1] / static_cast<double>(cnt[1])) : 0.0;
      row.pba_err_pavg = cnt[2] ? std::exp(log_sum[2] / static_cast<double>(cnt[2])) : 0.0;
    }
    double sa_log_sum = 0.0;
    std::size_t sa_cnt = 0;
    for (const auto& c : curves) {
      double err = -1.0;
      for (const auto& [t, e] : c.err_at) {
        if (t <= q) err = e;
        else break;
      }
      if (err > 0.0) {
        sa_log_sum += std::log(err);
        ++sa_cnt;
      }
    }
    if (sa_cnt > 0) {
      row.sa_present = true;
      row.sa_err = std::exp(sa_log_sum / static_cast<double>(sa_cnt));
    }
    rows.push_back(row);
  }
  return rows;
}

// --- writers ----------------------------------------------------------------------

inline void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << "n,reps_present,mean_t_n,geo_err_median,geo_err_wavg,geo_err_pavg,zero_drops\n";
  char buf[256];
  for (const auto& r : rows) {
    if (r.reps_present == 0) continue;
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%zu\n", r.n, r.reps_present,
                  r.mean_t, r.geo_err_median, r.geo_err_wavg, r.geo_err_pavg, r.zero_drops);
    os << buf;
  }
}

inline void write_sa_aggregate_csv(std::ostream& os, const std::vector<SaAggregateRow>& rows) {
  os << "t,reps_present,mean_err,geo_err,zero_drops\n";
  char buf[192];
  for (const auto& r : rows) {
    if (r.reps_present == 0) continue;
    std::snprintf(buf, sizeof buf, "%llu,%zu,%.17g,%.17g,%zu\n",
                  static_cast<unsigned long long>(r.t), r.reps_present, r.mean_err, r.geo_err,
                  r.zero_drops);
    os << buf;
  }
}

inline void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
  os << "queries,pba_err_median,pba_err_wavg,pba_err_pavg,sa_err\n";
  for (const auto& r : rows) {
    os << r.queries << ',';
    if (r.pba_present)
      os << fmt17(r.pba_err_median) << ',' << fmt17(r.pba_err_wavg) << ','
         << fmt17(r.pba_err_pavg);
    else
      os << ",,";
    os << ',';
    if (r.sa_present) os << fmt17(r.sa_err);
    os << '\n';
  }
}

inline void write_report(std::ostream& os, const std::vector<CheckResult>& results) {
  char head[384];
  std::snprintf(head, sizeof head,
                "# probisect check report\n"
                "# PASS rules: rate fits need slope < 0 and r^2 >= %g; the growth statistic\n"
                "# needs nondecreasing medians and last/first ratio > %g; the weighted-\n"
                "# estimator statistic needs p90(last) <= %g * p90(second). Rate fits start "
                "at n = %zu.\n",
                kMinRSquared, kGrowthMinRatio, kTightnessMaxRatio, kFitBurnIn);
  os << head;
  for (const auto& r : results) {
    os << r.name << ' ' << (r.judged ? (r.pass ? "PASS" : "FAIL") : "REPORT") << ' ' << r.detail
       << '\n';
  }
}

}  // namespace probisect
