#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "probisect/stochastic_approximation.hpp"

using namespace probisect;

TEST_CASE("sa_step arithmetic and clamping", "[sa]") {
  REQUIRE(sa_step(0.5, 0.2, 1.0) == 0.7);
  REQUIRE(sa_step(0.9, 0.5, 1.0) == 1.0);
  REQUIRE(sa_step(0.1, -0.5, 1.0) == 0.0);
  REQUIRE(sa_step(0.5, 0.0, 3.0) == 0.5);
  REQUIRE_THROWS_AS(sa_step(1.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("noiseless linear recursion lands on the root in one step", "[sa]") {
  const Problem prob(0.3, Shape::linear(1.0), Noise::gaussian(1e-14));
  SAConfig cfg;
  cfg.a = 1.0;
  cfg.x0 = 0.5;
  cfg.iters = 5;
  cfg.seed = 1;
  const auto series = run_sa(prob, cfg);
  REQUIRE(series.size() == 6);
  REQUIRE(series[0].t == 0);
  REQUIRE(series[0].x == 0.5);
  REQUIRE(std::abs(series[1].x - 0.3) < 1e-12);
  for (const auto& p : series) {
    REQUIRE(p.x >= 0.0);
    REQUIRE(p.x <= 1.0);
  }
  REQUIRE(std::abs(series[5].x - 0.3) < 1e-12);
}

TEST_CASE("zero iterations returns just the start point", "[sa]") {
  const Problem prob(0.3, Shape::linear(1.0), Noise::gaussian(1.0));
  SAConfig cfg;
  cfg.iters = 0;
  cfg.x0 = 0.4;
  const auto series = run_sa(prob, cfg);
  REQUIRE(series.size() == 1);
  REQUIRE(series[0].t == 0);
  REQUIRE(series[0].x == 0.4);
}

TEST_CASE("seeded runs reproduce bit-exactly and every iterate is clamped", "[sa]") {
  const Problem prob(0.31, Shape::linear(1.0), Noise::gaussian(1.0));
  SAConfig cfg;
  cfg.a = 2.0;
  cfg.iters = 5000;
  cfg.seed = 77;
  const auto a = run_sa(prob, cfg);
  const auto b = run_sa(prob, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].x == b[i].x);
    REQUIRE(a[i].x >= 0.0);
    REQUIRE(a[i].x <= 1.0);
  }
}

TEST_CASE("default gain uses the slope when available", "[sa]") {
  REQUIRE(default_sa_gain(Problem(0.3, Shape::linear(4.0), Noise::gaussian(1.0))) == 0.5);
  REQUIRE(default_sa_gain(Problem(0.3, Shape::step(1.0), Noise::gaussian(1.0))) == 2.0);
}

TEST_CASE("sa CSV thins to powers of two", "[sa]") {
  const Problem prob(0.3, Shape::linear(1.0), Noise::gaussian(1.0));
  SAConfig cfg;
  cfg.iters = 100;
  cfg.seed = 5;
  const auto series = run_sa(prob, cfg);
  std::ostringstream os;
  write_sa_csv(os, series, prob.root);
  const std::string text = os.str();
  REQUIRE(text.rfind("t,x_t,abs_err\n", 0) == 0);
  std::size_t rows = 0;
  for (char c : text)
    if (c == '\n') ++rows;
  REQUIRE(rows == 1 + 7);  // header + t in {1,2,4,...,64}
}
