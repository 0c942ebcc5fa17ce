#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "probisect/rng.hpp"

namespace probisect {

// Root-finding problem on [0,1]: querying x yields Y(x) = g(x) + noise, where
// g is positive left of the root and negative right of it.

enum class ShapeKind { linear, step, cube_root };

struct Shape {
  ShapeKind kind = ShapeKind::linear;
  double scale = 1.0;  // slope c, step level h, or cube-root scale c

  static Shape linear(double c) { return make(ShapeKind::linear, c); }
  static Shape step(double h) { return make(ShapeKind::step, h); }
  static Shape cube_root(double c) { return make(ShapeKind::cube_root, c); }

 private:
  static Shape make(ShapeKind k, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("shape: scale must be positive");
    return Shape{k, s};
  }
};

enum class NoiseKind { gaussian, uniform, student_t };

struct Noise {
  NoiseKind kind = NoiseKind::gaussian;
  double scale = 1.0;  // sigma, half width, or t scale
  double nu = 0.0;     // degrees of freedom, student_t only

  static Noise gaussian(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("noise: sigma must be positive");
    return Noise{NoiseKind::gaussian, sigma, 0.0};
  }
  static Noise uniform(double half_width) {
    if (!(half_width > 0.0)) throw std::invalid_argument("noise: half width must be positive");
    return Noise{NoiseKind::uniform, half_width, 0.0};
  }
  static Noise student_t(double nu, double s) {
    if (!(nu > 2.0)) throw std::invalid_argument("noise: student_t needs nu > 2");
    if (!(s > 0.0)) throw std::invalid_argument("noise: student_t scale must be positive");
    return Noise{NoiseKind::student_t, s, nu};
  }
};

struct Problem {
  double root = 0.5;  // x* in (0,1)
  Shape shape;
  Noise noise;

  Problem() = default;
  Problem(double x_star, Shape s, Noise n) : root(x_star), shape(s), noise(n) {
    if (!(x_star > 0.0 && x_star < 1.0))
      throw std::invalid_argument("problem: root must lie in (0,1)");
  }
};

// Constant-correctness signal model: the direction report is right with a
// fixed probability p, regardless of distance to the root.
struct ConstantPOracle {
  double root = 0.5;
  double p = 1.0;

  ConstantPOracle(double x_star, double prob) : root(x_star), p(prob) {
    if (!(x_star > 0.0 && x_star < 1.0))
      throw std::invalid_argument("constant-p oracle: root must lie in (0,1)");
    if (!(prob > 0.5 && prob <= 1.0))
      throw std::invalid_argument("constant-p oracle: p must lie in (1/2,1]");
  }
};

inline double g_value(const Problem& prob, double x) {
  const double d = prob.root - x;
  switch (prob.shape.kind) {
    case ShapeKind::linear:
      return prob.shape.scale * d;
    case ShapeKind::step:
      return d > 0.0 ? prob.shape.scale : (d < 0.0 ? -prob.shape.scale : 0.0);
    case ShapeKind::cube_root:
      return prob.shape.scale * std::cbrt(d);
  }
  return 0.0;
}

namespace detail {

inline double normal_cdf(double z) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  return 0.5 * std::erfc(-z * inv_sqrt2);
}

inline double student_t_cdf(double t, double nu) {
  return boost::math::cdf(boost::math::students_t_distribution<double>(nu), t);
}

inline double noise_cdf(const Noise& n, double z) {
  switch (n.kind) {
    case NoiseKind::gaussian:
      return normal_cdf(z / n.scale);
    case NoiseKind::uniform: {
      const double w = n.scale;
      if (z <= -w) return 0.0;
      if (z >= w) return 1.0;
      return (z + w) / (2.0 * w);
    }
    case NoiseKind::student_t:
      return student_t_cdf(z / n.scale, n.nu);
  }
  return 0.0;
}

inline double noise_draw(const Noise& n, Rng& rng) {
  switch (n.kind) {
    case NoiseKind::gaussian:
      return n.scale * rng.normal();
    case NoiseKind::uniform:
      return n.scale * (2.0 * rng.uniform01() - 1.0);
    case NoiseKind::student_t:
      return n.scale * rng.student_t(n.nu);
  }
  return 0.0;
}

}  // namespace detail

inline void require_query_point(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("oracle: x must lie in [0,1]");
}

inline double observe(const Problem& prob, double x, Rng& rng) {
  require_query_point(x);
  return g_value(prob, x) + detail::noise_draw(prob.noise, rng);
}

// +1 iff the noisy response is nonnegative, i.e. the query points right.
inline int sign_observe(const Problem& prob, double x, Rng& rng) {
  return observe(prob, x, rng) >= 0.0 ? +1 : -1;
}

// Exact probability that a single sign observation at x points toward the
// root, from the noise family's closed-form CDF.
inline double exact_tilde_p(const Problem& prob, double x) {
  require_query_point(x);
  const double gx = g_value(prob, x);
  if (x <= prob.root) return 1.0 - detail::noise_cdf(prob.noise, -gx);
  return detail::noise_cdf(prob.noise, -gx);
}

// Correct-direction sign with probability p; at x = root the convention is
// +1 with probability p.
inline int constant_p_signal(const ConstantPOracle& o, double x, Rng& rng) {
  require_query_point(x);
  const int correct = (x <= o.root) ? +1 : -1;
  return rng.uniform01() < o.p ? correct : -correct;
}

// --- problem spec strings ---------------------------------------------------
//
// Grammar: semicolon-separated sections of comma-separated key=value pairs.
//   shape=linear,c=1.0,root=0.31;noise=gaussian,sigma=1.0
//   shape=step,h=1.0,root=0.5;noise=uniform,w=0.5
//   shape=cube_root,c=1.0,root=0.4;noise=student_t,nu=3.0,s=1.0
//   shape=constp,p=0.85,root=0.3          (constant-correctness oracle)

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline double parse_number(const std::string& s, const std::string& key) {
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::invalid_argument("problem spec: bad number for '" + key + "': " + s);
  return value;
}

struct KvSection {
  std::string head;  // value of the first pair (e.g. "linear" from shape=linear)
  std::vector<std::pair<std::string, std::string>> kv;
};

inline KvSection parse_section(const std::string& text, const std::string& expect_key) {
  KvSection out;
  const auto pairs = split(text, ',');
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto eq = pairs[i].find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("problem spec: expected key=value, got: " + pairs[i]);
    const std::string k = pairs[i].substr(0, eq);
    const std::string v = pairs[i].substr(eq + 1);
    if (i == 0) {
      if (k != expect_key)
        throw std::invalid_argument("problem spec: section must start with '" + expect_key + "='");
      out.head = v;
    } else {
      out.kv.emplace_back(k, v);
    }
  }
  return out;
}

inline double require_kv(const KvSection& sec, const std::string& key) {
  for (const auto& [k, v] : sec.kv)
    if (k == key) return parse_number(v, key);
  throw std::invalid_argument("problem spec: missing key '" + key + "'");
}

}  // namespace detail

inline bool is_constant_p_spec(const std::string& spec) {
  return spec.rfind("shape=constp", 0) == 0;
}

inline ConstantPOracle parse_constant_p(const std::string& spec) {
  const auto sections = detail::split(spec, ';');
  const auto shape = detail::parse_section(sections[0], "shape");
  if (shape.head != "constp")
    throw std::invalid_argument("problem spec: expected shape=constp");
  return ConstantPOracle(detail::require_kv(shape, "root"), detail::require_kv(shape, "p"));
}

inline Problem parse_problem(const std::string& spec) {
  const auto sections = detail::split(spec, ';');
  if (sections.size() != 2)
    throw std::invalid_argument("problem spec: expected 'shape=...;noise=...'");
  const auto shape_sec = detail::parse_section(sections[0], "shape");
  const auto noise_sec = detail::parse_section(sections[1], "noise");

  const double root = detail::require_kv(shape_sec, "root");
  Shape shape;
  if (shape_sec.head == "linear") {
    shape = Shape::linear(detail::require_kv(shape_sec, "c"));
  } else if (shape_sec.head == "step") {
    shape = Shape::step(detail::require_kv(shape_sec, "h"));
  } else if (shape_sec.head == "cube_root") {
    shape = Shape::cube_root(detail::require_kv(shape_sec, "c"));
  } else {
    throw std::invalid_argument("problem spec: unknown shape '" + shape_sec.head + "'");
  }

  Noise noise;
  if (noise_sec.head == "gaussian") {
    noise = Noise::gaussian(detail::require_kv(noise_sec, "sigma"));
  } else if (noise_sec.head == "uniform") {
    noise = Noise::uniform(detail::require_kv(noise_sec, "w"));
  } else if (noise_sec.head == "student_t") {
    noise = Noise::student_t(detail::require_kv(noise_sec, "nu"), detail::require_kv(noise_sec, "s"));
  } else {
    throw std::invalid_argument("problem spec: unknown noise '" + noise_sec.head + "'");
  }

  return Problem(root, shape, noise);
}

}  // namespace probisect
