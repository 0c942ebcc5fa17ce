#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "probisect/oracle.hpp"
#include "probisect/rng.hpp"

namespace probisect {

// Robbins-Monro baseline on the same problem interface, with gain a/(t+1)
// and projection onto [0,1]. One function query per iteration, so wall-clock
// time equals the iteration index.
struct SAConfig {
  double a = 2.0;        // gain numerator
  double x0 = 0.5;       // start point
  std::uint64_t iters = 0;
  std::uint64_t seed = 0;
};

struct SAPoint {
  std::uint64_t t = 0;
  double x = 0.0;
};

// Ascent step: g is positive left of the root, so positive observations push
// right. The iterate is clamped to [0,1].
inline double sa_step(double x, double y, double a_n) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("sa_step: x must lie in [0,1]");
  return std::clamp(x + a_n * y, 0.0, 1.0);
}

inline std::vector<SAPoint> run_sa(const Problem& prob, const SAConfig& cfg, Rng& rng) {
  if (!(cfg.a > 0.0)) throw std::invalid_argument("run_sa: gain numerator must be positive");
  if (!(cfg.x0 >= 0.0 && cfg.x0 <= 1.0)) throw std::invalid_argument("run_sa: x0 must lie in [0,1]");
  std::vector<SAPoint> out;
  out.reserve(cfg.iters + 1);
  double x = cfg.x0;
  out.push_back({0, x});
  for (std::uint64_t t = 0; t < cfg.iters; ++t) {
    const double y = observe(prob, x, rng);
    x = sa_step(x, y, cfg.a / static_cast<double>(t + 1));
    out.push_back({t + 1, x});
  }
  return out;
}

inline std::vector<SAPoint> run_sa(const Problem& prob, const SAConfig& cfg) {
  Rng rng(cfg.seed);
  return run_sa(prob, cfg, rng);
}

// Default gain: 2/c when the shape exposes a slope, otherwise 2.
inline double default_sa_gain(const Problem& prob) {
  if (prob.shape.kind == ShapeKind::linear) return 2.0 / prob.shape.scale;
  return 2.0;
}

// CSV thinned to t in {1, 2, 4, 8, ...} so million-iteration runs stay small.
inline void write_sa_csv(std::ostream& os, const std::vector<SAPoint>& series, double true_root) {
  os << "t,x_t,abs_err\n";
  char buf[128];
  for (std::uint64_t t = 1; t < series.size(); t *= 2) {
    const SAPoint& p = series[t];
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g\n", static_cast<unsigned long long>(p.t), p.x,
                  std::abs(p.x - true_root));
    os << buf;
  }
}

}  // namespace probisect
