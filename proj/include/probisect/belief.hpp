#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace probisect {

// Piecewise-constant density on [0, 1]. Heights live in log space: repeated
// multiplicative updates push direct-space heights out of double range long
// before log space loses accuracy. Values are treated as immutable; every
// operation returns a fresh density.
struct BeliefDensity {
  std::vector<double> breakpoints;  // strictly increasing, first 0.0, last 1.0
  std::vector<double> log_heights;  // one per cell [breakpoints[i], breakpoints[i+1])
  std::size_t update_count = 0;

  std::size_t cell_count() const { return log_heights.size(); }
};

namespace detail {

// Cell masses rescaled by exp(-log_scale) so they stay representable even
// when the raw density carries hundreds of nats of imbalance.
struct ScaledCellMasses {
  double log_scale = 0.0;
  std::vector<double> mass;  // exp(log cell mass - log_scale)
  double total = 0.0;        // sum of scaled masses
};

inline ScaledCellMasses scaled_cell_masses(const BeliefDensity& d) {
  const std::size_t k = d.cell_count();
  ScaledCellMasses out;
  out.mass.resize(k);
  double max_lm = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    const double width = d.breakpoints[i + 1] - d.breakpoints[i];
    const double lm = d.log_heights[i] + std::log(width);
    out.mass[i] = lm;
    if (lm > max_lm) max_lm = lm;
  }
  out.log_scale = max_lm;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out.mass[i] = std::exp(out.mass[i] - max_lm);
    sum += out.mass[i];
  }
  out.total = sum;
  return out;
}

}  // namespace detail

inline BeliefDensity uniform_prior() {
  BeliefDensity d;
  d.breakpoints = {0.0, 1.0};
  d.log_heights = {0.0};
  d.update_count = 0;
  return d;
}

// Throws if the structural invariants are violated; used by tests and as a
// guard after deserialization-like construction.
inline void check_invariants(const BeliefDensity& d) {
  if (d.breakpoints.size() < 2 || d.breakpoints.front() != 0.0 || d.breakpoints.back() != 1.0)
    throw std::runtime_error("belief: breakpoints must start at 0 and end at 1");
  if (d.log_heights.size() + 1 != d.breakpoints.size())
    throw std::runtime_error("belief: need one height per cell");
  for (std::size_t i = 0; i + 1 < d.breakpoints.size(); ++i)
    if (!(d.breakpoints[i] < d.breakpoints[i + 1]))
      throw std::runtime_error("belief: breakpoints must be strictly increasing");
  for (double lh : d.log_heights)
    if (!std::isfinite(lh)) throw std::runtime_error("belief: log heights must be finite");
}

// Multiplies the density by 2p above x and 2q below x (z = +1), or the
// mirror image (z = -1). A breakpoint is inserted at x unless one is already
// there; existing breakpoints are never merged. p = 1/2 is accepted as the
// degenerate no-op multiplier.
inline BeliefDensity update(const BeliefDensity& d, double x, int z, double p) {
  if (!std::isfinite(x) || x <= 0.0 || x >= 1.0)
    throw std::invalid_argument("belief update: x must lie strictly inside (0,1)");
  if (!(p >= 0.5 && p < 1.0))
    throw std::invalid_argument("belief update: p must lie in [1/2,1)");
  if (z != 1 && z != -1) throw std::invalid_argument("belief update: z must be +1 or -1");

  BeliefDensity out = d;
  auto& bp = out.breakpoints;
  auto& lh = out.log_heights;

  const auto pos = std::lower_bound(bp.begin(), bp.end(), x);
  auto split = static_cast<std::size_t>(pos - bp.begin());
  if (*pos != x) {
    const double h = lh[split - 1];
    bp.insert(pos, x);
    lh.insert(lh.begin() + static_cast<std::ptrdiff_t>(split), h);
  }

  const double log_up = std::log(2.0 * p);
  const double log_down = std::log(2.0 * (1.0 - p));
  const double above = (z == 1) ? log_up : log_down;
  const double below = (z == 1) ? log_down : log_up;
  for (std::size_t i = 0; i < split; ++i) lh[i] += below;
  for (std::size_t i = split; i < lh.size(); ++i) lh[i] += above;
  ++out.update_count;
  return out;
}

// x with F(x) = u * total mass, by cell-wise accumulation and exact linear
// inversion inside the crossing cell. Works for unnormalized densities too.
inline double quantile(const BeliefDensity& d, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("belief quantile: u must lie in (0,1)");
  const auto cm = detail::scaled_cell_masses(d);
  const double target = u * cm.total;
  const std::size_t k = d.cell_count();
  double cum = 0.0;
  std::size_t cell = k - 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (cum + cm.mass[i] >= target) {
      cell = i;
      break;
    }
    cum += cm.mass[i];
  }
  const double lo = d.breakpoints[cell];
  const double hi = d.breakpoints[cell + 1];
  const double delta = target - cum;
  if (delta <= 0.0) return lo;
  if (delta >= cm.mass[cell]) return hi;
  return std::min(hi, lo + (delta / cm.mass[cell]) * (hi - lo));
}

inline double median(const BeliefDensity& d) { return quantile(d, 0.5); }

// Integral of the density over [lo, hi].
inline double mass(const BeliefDensity& d, double lo, double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
    throw std::invalid_argument("belief mass: need 0 <= lo <= hi <= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < d.cell_count(); ++i) {
    const double a = std::max(lo, d.breakpoints[i]);
    const double b = std::min(hi, d.breakpoints[i + 1]);
    if (b <= a) continue;
    const double lh = d.log_heights[i];
    // exp(lh) alone can overflow when the cell is extremely narrow.
    sum += (lh > 700.0) ? std::exp(lh + std::log(b - a)) : std::exp(lh) * (b - a);
  }
  return sum;
}

inline double total_mass(const BeliefDensity& d) { return mass(d, 0.0, 1.0); }

// Shifts all log heights by a constant so the total mass returns to 1.
// Quantiles are invariant under the shift. Refuses obviously corrupt input.
inline BeliefDensity renormalize(const BeliefDensity& d) {
  BeliefDensity out = d;
  for (int pass = 0; pass < 3; ++pass) {
    const auto cm = detail::scaled_cell_masses(out);
    const double log_mass = cm.log_scale + std::log(cm.total);
    if (!(log_mass >= std::log(1e-6) && log_mass <= std::log(1e6)))
      throw std::runtime_error("belief renormalize: total mass outside sanity window");
    for (double& lh : out.log_heights) lh -= log_mass;
    if (std::abs(total_mass(out) - 1.0) <= 1e-14) break;
  }
  return out;
}

// One text line per cell: "lo hi log_height" at 17 significant digits.
inline void dump(const BeliefDensity& d, std::ostream& os) {
  char buf[128];
  for (std::size_t i = 0; i < d.cell_count(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", d.breakpoints[i], d.breakpoints[i + 1],
                  d.log_heights[i]);
    os << buf;
  }
}

}  // namespace probisect
