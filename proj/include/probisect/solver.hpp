#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "probisect/belief.hpp"
#include "probisect/oracle.hpp"
#include "probisect/rng.hpp"
#include "probisect/sequential_test.hpp"

namespace probisect {

struct SolverConfig {
  double gamma = 0.2;        // power-one confidence parameter (extended mode)
  double update_p = 0.7;     // belief update probability
  std::size_t macro_iters = 100;
  std::uint64_t max_total_queries = 1'000'000'000;  // global query budget
  std::uint64_t max_test_steps = 10'000'000;        // per-test truncation
  std::size_t renorm_every = 64;                    // belief renormalization cadence
  std::uint64_t seed = 0;
};

struct TraceRecord {
  std::size_t n = 0;                // macro iteration index
  double x = 0.0;                   // query point (belief median before the update)
  int z = 0;                        // aggregated sign decision
  std::uint64_t runlength = 0;      // queries consumed by this iteration
  std::uint64_t total_queries = 0;  // cumulative queries through this iteration
};

// Two-timescale trace: one record per completed macro iteration. `stalled`
// flags a run cut short by an inconclusive test or an exhausted query budget;
// the partial records stay usable.
struct SolverTrace {
  std::vector<TraceRecord> records;
  bool stalled = false;
};

namespace detail {

inline void validate_common(const SolverConfig& cfg) {
  if (cfg.renorm_every < 1) throw std::invalid_argument("solver: renorm_every must be >= 1");
  if (cfg.max_test_steps < 1) throw std::invalid_argument("solver: max_test_steps must be >= 1");
  if (cfg.max_total_queries < 1) throw std::invalid_argument("solver: max_total_queries must be >= 1");
}

// Renormalizes on the configured cadence, and immediately whenever drift
// exceeds the run-time mass guard. The immediate path matters once the
// belief has concentrated to one double ulp: median splits are no longer
// representable there, so a single update can shift the total mass by a
// full multiplier.
inline BeliefDensity renormalize_if_needed(BeliefDensity belief, std::size_t renorm_every) {
  if (belief.update_count % renorm_every == 0 || std::abs(total_mass(belief) - 1.0) > 1e-9)
    return renormalize(belief);
  return belief;
}

}  // namespace detail

// Extended probabilistic bisection: each macro iteration runs a power-one
// sign test at the belief median, then applies one multiplicative update
// with the configured p. Requires update_p in (1/2, 1 - gamma/2).
inline SolverTrace run_extended(const Problem& prob, const SolverConfig& cfg, Rng& rng) {
  detail::validate_common(cfg);
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw std::invalid_argument("solver: gamma must lie in (0,1)");
  const double p_c = 1.0 - cfg.gamma / 2.0;
  if (!(cfg.update_p > 0.5 && cfg.update_p < p_c))
    throw std::invalid_argument("solver: extended mode needs 1/2 < update_p < 1 - gamma/2");

  SolverTrace trace;
  trace.records.reserve(cfg.macro_iters);
  BeliefDensity belief = uniform_prior();
  std::uint64_t total = 0;
  for (std::size_t n = 0; n < cfg.macro_iters; ++n) {
    const double x = median(belief);
    const std::uint64_t remaining = cfg.max_total_queries - total;
    if (remaining == 0) {
      trace.stalled = true;
      break;
    }
    const TestBoundary b{cfg.gamma, std::min(cfg.max_test_steps, remaining)};
    const TestOutcome out = run_test([&] { return sign_observe(prob, x, rng); }, b);
    if (out.decision == TestDecision::inconclusive) {
      trace.stalled = true;
      break;
    }
    total += out.runlength;
    const int z = out.decision == TestDecision::plus ? +1 : -1;
    trace.records.push_back({n, x, z, out.runlength, total});
    belief = update(belief, x, z, cfg.update_p);
    belief = detail::renormalize_if_needed(belief, cfg.renorm_every);
  }
  return trace;
}

inline SolverTrace run_extended(const Problem& prob, const SolverConfig& cfg) {
  Rng rng(cfg.seed);
  return run_extended(prob, cfg, rng);
}

// Classical probabilistic bisection: one constant-correctness signal per
// macro iteration, so wall-clock time equals the iteration count. With zero
// iterations the trace carries a single virtual record at the prior median.
inline SolverTrace run_classical(const ConstantPOracle& oracle, const SolverConfig& cfg, Rng& rng) {
  detail::validate_common(cfg);
  if (!(cfg.update_p > 0.5 && cfg.update_p < 1.0))
    throw std::invalid_argument("solver: classical mode needs update_p in (1/2,1)");

  SolverTrace trace;
  BeliefDensity belief = uniform_prior();
  if (cfg.macro_iters == 0) {
    trace.records.push_back({0, median(belief), 0, 0, 0});
    return trace;
  }
  trace.records.reserve(cfg.macro_iters);
  std::uint64_t total = 0;
  for (std::size_t n = 0; n < cfg.macro_iters; ++n) {
    if (total >= cfg.max_total_queries) {
      trace.stalled = true;
      break;
    }
    const double x = median(belief);
    const int z = constant_p_signal(oracle, x, rng);
    total += 1;
    trace.records.push_back({n, x, z, 1, total});
    belief = update(belief, x, z, cfg.update_p);
    belief = detail::renormalize_if_needed(belief, cfg.renorm_every);
  }
  return trace;
}

inline SolverTrace run_classical(const ConstantPOracle& oracle, const SolverConfig& cfg) {
  Rng rng(cfg.seed);
  return run_classical(oracle, cfg, rng);
}

// --- root estimators ----------------------------------------------------------

inline double median_estimate(const SolverTrace& trace) {
  if (trace.records.empty()) throw std::invalid_argument("median_estimate: empty trace");
  return trace.records.back().x;
}

namespace detail {

inline double mean_x(const SolverTrace& trace) {
  double s = 0.0;
  for (const auto& r : trace.records) s += r.x;
  return s / static_cast<double>(trace.records.size());
}

}  // namespace detail

// Runlength-weighted average with weights N_i^(1/2 - epsilon). A zero weight
// sum (possible only for virtual records) falls back to the unweighted mean.
inline double weighted_average_estimate(const SolverTrace& trace, double epsilon) {
  if (trace.records.empty()) throw std::invalid_argument("weighted_average_estimate: empty trace");
  if (!(epsilon > 0.0 && epsilon <= 0.5))
    throw std::invalid_argument("weighted_average_estimate: epsilon must lie in (0,1/2]");
  const double exponent = 0.5 - epsilon;
  double wsum = 0.0;
  double wx = 0.0;
  for (const auto& r : trace.records) {
    const double w = std::pow(static_cast<double>(r.runlength), exponent);
    wsum += w;
    wx += w * r.x;
  }
  if (wsum == 0.0) return detail::mean_x(trace);
  return wx / wsum;
}

// Query-time-weighted average: sum N_i X_i / sum N_i.
inline double perfect_average_estimate(const SolverTrace& trace) {
  if (trace.records.empty()) throw std::invalid_argument("perfect_average_estimate: empty trace");
  double nsum = 0.0;
  double nx = 0.0;
  for (const auto& r : trace.records) {
    const double n = static_cast<double>(r.runlength);
    nsum += n;
    nx += n * r.x;
  }
  if (nsum == 0.0) return detail::mean_x(trace);
  return nx / nsum;
}

// All three estimators evaluated on every prefix of the trace, in O(1) per
// record via running sums. Entry i uses records 0..i inclusive.
struct PrefixEstimates {
  std::vector<double> median_est;
  std::vector<double> wavg_est;
  std::vector<double> pavg_est;
};

inline PrefixEstimates prefix_estimates(const SolverTrace& trace, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.5))
    throw std::invalid_argument("prefix_estimates: epsilon must lie in (0,1/2]");
  const double exponent = 0.5 - epsilon;
  PrefixEstimates out;
  const std::size_t k = trace.records.size();
  out.median_est.reserve(k);
  out.wavg_est.reserve(k);
  out.pavg_est.reserve(k);
  double wsum = 0.0, wx = 0.0, nsum = 0.0, nx = 0.0, xsum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& r = trace.records[i];
    const double n = static_cast<double>(r.runlength);
    const double w = std::pow(n, exponent);
    wsum += w;
    wx += w * r.x;
    nsum += n;
    nx += n * r.x;
    xsum += r.x;
    const double mean = xsum / static_cast<double>(i + 1);
    out.median_est.push_back(r.x);
    out.wavg_est.push_back(wsum == 0.0 ? mean : wx / wsum);
    out.pavg_est.push_back(nsum == 0.0 ? mean : nx / nsum);
  }
  return out;
}

// CSV with one row per record. Estimator columns use records 0..n inclusive;
// error columns use the true root, which is known in simulation.
inline void write_trace_csv(std::ostream& os, const SolverTrace& trace, double true_root,
                            double epsilon) {
  os << "n,x_n,z_n,n_n,t_n,abs_err,est_median,est_wavg,est_pavg\n";
  const PrefixEstimates est = prefix_estimates(trace, epsilon);
  char buf[256];
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%d,%llu,%llu,%.17g,%.17g,%.17g,%.17g\n", r.n, r.x,
                  r.z, static_cast<unsigned long long>(r.runlength),
                  static_cast<unsigned long long>(r.total_queries), std::abs(r.x - true_root),
                  est.median_est[i], est.wavg_est[i], est.pavg_est[i]);
    os << buf;
  }
}

}  // namespace probisect
