#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace probisect {

// Deterministic random source. Every draw is derived from mt19937_64 output
// words through fixed arithmetic, so a seed pins the whole stream independent
// of standard-library distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal, Marsaglia polar method. The paired variate is cached
  // and handed out by the next call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Student-t with nu degrees of freedom, Bailey's polar method. Unlike the
  // normal case the two polar components are dependent, so no caching.
  double student_t(double nu) {
    double u, v, w;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      w = u * u + v * v;
    } while (w >= 1.0 || w == 0.0);
    return u * std::sqrt(nu * (std::pow(w, -2.0 / nu) - 1.0) / w);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace probisect
