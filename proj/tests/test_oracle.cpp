#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "probisect/oracle.hpp"
#include "probisect/rng.hpp"

using namespace probisect;

namespace {

constexpr double kPhiHalf = 0.69146246127401312;  // standard normal CDF at 0.5
constexpr double kPhiOne = 0.84134474606854293;   // standard normal CDF at 1

double phi_density(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// Closed form for the Student-t CDF at three degrees of freedom.
double t3_cdf(double x) {
  const double s = x / std::sqrt(3.0);
  return 0.5 + (s / (1.0 + s * s) + std::atan(s)) / M_PI;
}

std::vector<Problem> shipped_problems(double root) {
  std::vector<Problem> out;
  const Shape shapes[3] = {Shape::linear(1.0), Shape::step(1.0), Shape::cube_root(1.0)};
  const Noise noises[3] = {Noise::gaussian(1.0), Noise::uniform(0.5), Noise::student_t(3.0, 1.0)};
  for (const auto& s : shapes)
    for (const auto& n : noises) out.emplace_back(root, s, n);
  return out;
}

}  // namespace

TEST_CASE("noiseless limits of observe and sign_observe", "[oracle]") {
  Rng rng(1);
  const Problem linear(0.5, Shape::linear(1.0), Noise::gaussian(1e-12));
  REQUIRE(std::abs(observe(linear, 0.2, rng) - 0.3) < 1e-11);
  const Problem step(0.5, Shape::step(1.0), Noise::gaussian(1e-12));
  REQUIRE(std::abs(observe(step, 0.6, rng) - (-1.0)) < 1e-11);
  REQUIRE(sign_observe(linear, 0.2, rng) == +1);
  REQUIRE(sign_observe(linear, 0.9, rng) == -1);
  REQUIRE_THROWS_AS(observe(linear, -0.1, rng), std::invalid_argument);
  REQUIRE_THROWS_AS(observe(linear, 1.1, rng), std::invalid_argument);
}

TEST_CASE("sample mean of observations matches g", "[oracle]") {
  Rng rng(2);
  const Problem prob(0.5, Shape::linear(1.0), Noise::gaussian(1.0));
  double sum = 0.0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) sum += observe(prob, 0.2, rng);
  REQUIRE(std::abs(sum / n - 0.3) < 0.01);
}

TEST_CASE("exact_tilde_p closed forms", "[oracle]") {
  const Problem linear(0.5, Shape::linear(1.0), Noise::gaussian(1.0));
  REQUIRE(exact_tilde_p(linear, 0.5) == 0.5);
  REQUIRE(std::abs(exact_tilde_p(linear, 0.0) - kPhiHalf) < 1e-12);
  const Problem step(0.5, Shape::step(1.0), Noise::gaussian(1.0));
  REQUIRE(std::abs(exact_tilde_p(step, 0.1) - kPhiOne) < 1e-12);
  REQUIRE(std::abs(exact_tilde_p(step, 0.9) - kPhiOne) < 1e-12);
}

TEST_CASE("empirical sign frequency matches exact_tilde_p", "[oracle]") {
  Rng rng(3);
  const Problem prob(0.5, Shape::linear(1.0), Noise::gaussian(1.0));
  int plus = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) plus += sign_observe(prob, 0.0, rng) == +1 ? 1 : 0;
  REQUIRE(std::abs(static_cast<double>(plus) / n - kPhiHalf) < 0.005);
}

TEST_CASE("student-t noise: sampler and CDF agree", "[oracle]") {
  // Sampler (polar method) and CDF (incomplete beta route) are independent;
  // both are cross-checked against the nu = 3 closed form.
  REQUIRE(std::abs(detail::student_t_cdf(0.0, 3.0) - 0.5) < 1e-15);
  for (double x : {-2.0, -0.7, 0.3, 1.0, 2.5})
    REQUIRE(std::abs(detail::student_t_cdf(x, 3.0) - t3_cdf(x)) < 1e-12);

  Rng rng(4);
  const int n = 200'000;
  for (double q : {-1.0, 0.0, 0.8}) {
    int below = 0;
    Rng local(17 + static_cast<std::uint64_t>(q * 10.0 + 100.0));
    for (int i = 0; i < n; ++i) below += local.student_t(3.0) <= q ? 1 : 0;
    REQUIRE(std::abs(static_cast<double>(below) / n - t3_cdf(q)) < 0.005);
  }
  (void)rng;
}

TEST_CASE("constant-p oracle signals", "[oracle]") {
  Rng rng(5);
  const ConstantPOracle sure(0.5, 1.0);
  for (int i = 0; i < 20; ++i) {
    REQUIRE(constant_p_signal(sure, 0.2, rng) == +1);
    REQUIRE(constant_p_signal(sure, 0.8, rng) == -1);
  }
  const ConstantPOracle noisy(0.5, 0.7);
  int plus = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) plus += constant_p_signal(noisy, 0.2, rng) == +1 ? 1 : 0;
  REQUIRE(std::abs(static_cast<double>(plus) / n - 0.7) < 0.005);
  REQUIRE_THROWS_AS(ConstantPOracle(0.5, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(ConstantPOracle(0.0, 0.9), std::invalid_argument);
}

TEST_CASE("correct-direction probability exceeds 1/2 everywhere off the root", "[oracle]") {
  for (const Problem& prob : shipped_problems(0.31)) {
    for (int i = 0; i <= 1000; ++i) {
      const double x = static_cast<double>(i) / 1000.0;
      if (std::abs(x - prob.root) < 1e-12) continue;
      REQUIRE(exact_tilde_p(prob, x) > 0.5);
    }
  }
}

TEST_CASE("linear shape with gaussian noise brackets p - 1/2 linearly", "[oracle]") {
  const double c = 1.0, sigma = 1.0;
  const Problem prob(0.31, Shape::linear(c), Noise::gaussian(sigma));
  const double lower = (c / sigma) * phi_density(c / sigma);  // MVT bound on [0,1]
  const double upper = c / (sigma * std::sqrt(2.0 * M_PI));
  for (int i = 0; i <= 1000; ++i) {
    const double x = static_cast<double>(i) / 1000.0;
    const double d = std::abs(x - prob.root);
    if (d < 1e-12) continue;
    const double excess = exact_tilde_p(prob, x) - 0.5;
    REQUIRE(excess / d >= lower - 1e-12);
    REQUIRE(excess <= upper * d + 1e-12);
  }
}

TEST_CASE("observations are serially uncorrelated", "[oracle]") {
  Rng rng(6);
  const Problem prob(0.5, Shape::linear(1.0), Noise::gaussian(1.0));
  const int n = 100'000;
  std::vector<double> ys(n);
  for (int i = 0; i < n; ++i) ys[i] = observe(prob, 0.3, rng);
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= n;
  double c0 = 0.0, c1 = 0.0;
  for (int i = 0; i < n; ++i) c0 += (ys[i] - mean) * (ys[i] - mean);
  for (int i = 0; i + 1 < n; ++i) c1 += (ys[i] - mean) * (ys[i + 1] - mean);
  REQUIRE(std::abs(c1 / c0) < 0.01);
}

TEST_CASE("problem spec strings", "[oracle]") {
  const Problem p = parse_problem("shape=linear,c=1.0,root=0.31;noise=gaussian,sigma=1.0");
  REQUIRE(p.shape.kind == ShapeKind::linear);
  REQUIRE(p.shape.scale == 1.0);
  REQUIRE(p.root == 0.31);
  REQUIRE(p.noise.kind == NoiseKind::gaussian);
  REQUIRE(p.noise.scale == 1.0);

  const Problem q = parse_problem("shape=step,h=2.0,root=0.5;noise=uniform,w=0.25");
  REQUIRE(q.shape.kind == ShapeKind::step);
  REQUIRE(q.noise.kind == NoiseKind::uniform);

  const Problem r = parse_problem("shape=cube_root,c=0.5,root=0.4;noise=student_t,nu=4.0,s=2.0");
  REQUIRE(r.shape.kind == ShapeKind::cube_root);
  REQUIRE(r.noise.nu == 4.0);

  REQUIRE(is_constant_p_spec("shape=constp,p=0.85,root=0.3"));
  const ConstantPOracle o = parse_constant_p("shape=constp,p=0.85,root=0.3");
  REQUIRE(o.p == 0.85);
  REQUIRE(o.root == 0.3);

  REQUIRE_THROWS_AS(parse_problem("shape=linear,c=1.0,root=0.31"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_problem("shape=bogus,c=1.0,root=0.3;noise=gaussian,sigma=1"),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(parse_problem("shape=linear,c=oops,root=0.3;noise=gaussian,sigma=1"),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(parse_problem("shape=linear,root=0.3;noise=gaussian,sigma=1"),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(parse_problem("noise=gaussian,sigma=1;shape=linear,c=1,root=0.3"),
                    std::invalid_argument);
}
