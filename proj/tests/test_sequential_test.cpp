#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "probisect/rng.hpp"
#include "probisect/sequential_test.hpp"

using namespace probisect;

namespace {

TestOutcome run_on_vector(const std::vector<int>& signs, const TestBoundary& b) {
  std::size_t i = 0;
  return run_test([&] { return signs[i++]; }, b);
}

}  // namespace

TEST_CASE("boundary closed form", "[sequential]") {
  REQUIRE(std::abs(boundary_value(1, 0.2) - std::sqrt(2.0 * std::log(10.0))) < 1e-15);
  REQUIRE(std::abs(boundary_value(1, 0.2) - 2.1459660262893476) < 1e-12);
  REQUIRE(std::abs(boundary_value(1, 1.0 - 1e-12) - std::sqrt(2.0 * std::log(2.0))) < 1e-6);
  REQUIRE(std::abs(boundary_value(8, 0.2) - std::sqrt(16.0 * std::log(45.0))) < 1e-12);
  REQUIRE(std::abs(boundary_value(8, 0.2) - 7.8043) < 1e-4);
  // strictly increasing in m
  double prev = 0.0;
  for (std::uint64_t m = 1; m <= 2000; ++m) {
    const double k = boundary_value(m, 0.2);
    REQUIRE(k > prev);
    prev = k;
  }
  REQUIRE_THROWS_AS(boundary_value(0, 0.2), std::invalid_argument);
  REQUIRE_THROWS_AS(boundary_value(3, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(boundary_value(3, 1.0), std::invalid_argument);
}

TEST_CASE("all +1 stream stops at 8 under gamma 0.2", "[sequential]") {
  const TestBoundary b{0.2, 1000};
  const TestOutcome out = run_test([] { return +1; }, b);
  REQUIRE(out.decision == TestDecision::plus);
  REQUIRE(out.runlength == 8);
  REQUIRE(out.final_sum == 8);
  // one step before stopping the sum sits strictly inside the boundary
  REQUIRE(7.0 < boundary_value(7, 0.2));
  REQUIRE(8.0 >= boundary_value(8, 0.2));

  const TestOutcome neg = run_test([] { return -1; }, b);
  REQUIRE(neg.decision == TestDecision::minus);
  REQUIRE(neg.runlength == 8);
  REQUIRE(neg.final_sum == -8);
}

TEST_CASE("alternating stream never crosses", "[sequential]") {
  int sign = +1;
  const TestOutcome out = run_test(
      [&] {
        sign = -sign;
        return sign;
      },
      TestBoundary{0.2, 1000});
  REQUIRE(out.decision == TestDecision::inconclusive);
  REQUIRE(out.runlength == 1000);
  REQUIRE(std::abs(out.final_sum) <= 1);
}

TEST_CASE("stream validation and parameter validation", "[sequential]") {
  REQUIRE_THROWS_AS(run_test([] { return 2; }, TestBoundary{0.2, 10}), std::invalid_argument);
  REQUIRE_THROWS_AS(run_test([] { return +1; }, TestBoundary{0.0, 10}), std::invalid_argument);
  REQUIRE_THROWS_AS(run_test([] { return +1; }, TestBoundary{0.2, 0}), std::invalid_argument);
}

TEST_CASE("no stop can happen before m = 8 at gamma 0.2", "[sequential]") {
  // |S_m| <= m < k_m for all m < 8, so any stream needs at least 8 steps.
  for (std::uint64_t m = 1; m < 8; ++m) REQUIRE(static_cast<double>(m) < boundary_value(m, 0.2));
  Rng rng(101);
  for (int rep = 0; rep < 200; ++rep) {
    const double p = rng.uniform01();
    const TestOutcome out =
        run_test([&] { return rng.uniform01() < p ? +1 : -1; }, TestBoundary{0.2, 5000});
    if (out.decision != TestDecision::inconclusive) {
      REQUIRE(out.runlength >= 8);
      // the final sum sits on the stopping side of the boundary
      REQUIRE(std::abs(static_cast<double>(out.final_sum)) >=
              boundary_value(out.runlength, 0.2));
      REQUIRE((out.decision == TestDecision::plus) == (out.final_sum > 0));
    }
  }
}

TEST_CASE("coupled streams: raising the drift cannot flip plus to minus", "[sequential]") {
  Rng rng(103);
  const TestBoundary b{0.2, 20'000};
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> us(b.max_steps);
    for (double& u : us) u = rng.uniform01();
    const double p_low = 0.5 + 0.3 * rng.uniform01();
    const double p_high = p_low + (1.0 - p_low) * rng.uniform01();
    std::size_t i = 0, j = 0;
    const TestOutcome low = run_test([&] { return us[i++] < p_low ? +1 : -1; }, b);
    const TestOutcome high = run_test([&] { return us[j++] < p_high ? +1 : -1; }, b);
    if (low.decision == TestDecision::plus) {
      REQUIRE(high.decision == TestDecision::plus);
      REQUIRE(high.runlength <= low.runlength);
    }
  }
}

TEST_CASE("mean runlength scales like theta^-2 log(1/theta)", "[sequential]") {
  const double thetas[4] = {0.4, 0.2, 0.1, 0.05};
  double means[4];
  Rng rng(107);
  for (int k = 0; k < 4; ++k) {
    const double p = 0.5 + thetas[k] / 2.0;
    double total = 0.0;
    const int reps = 300;
    for (int rep = 0; rep < reps; ++rep) {
      const TestOutcome out =
          run_test([&] { return rng.uniform01() < p ? +1 : -1; }, TestBoundary{0.2, 1'000'000});
      REQUIRE(out.decision != TestDecision::inconclusive);
      total += static_cast<double>(out.runlength);
    }
    means[k] = total / reps;
  }
  for (int k = 0; k + 1 < 4; ++k) REQUIRE(means[k] < means[k + 1]);
  // normalized means stay inside a fixed band
  for (int k = 0; k < 4; ++k) {
    const double normalized = means[k] * thetas[k] * thetas[k] / std::log(1.0 / thetas[k]);
    REQUIRE(normalized > 2.0);
    REQUIRE(normalized < 30.0);
  }
}

TEST_CASE("error probability estimates", "[sequential]") {
  const auto sure = estimate_error_probability(1.0, 0.2, 50, 1000, 1);
  REQUIRE(sure.stop_fraction == 1.0);
  REQUIRE(sure.wrong_sign_fraction == 0.0);

  // small-scale version of the zero-drift bound; the acceptance suite runs
  // the full-size experiment
  const auto null = estimate_error_probability(0.5, 0.2, 400, 20'000, 2);
  REQUIRE(null.stop_fraction <= 0.2 + 3.0 * std::sqrt(0.2 * 0.8 / 400.0));

  const auto drift = estimate_error_probability(0.6, 0.2, 400, 100'000, 3);
  REQUIRE(drift.stop_fraction == 1.0);
  REQUIRE(drift.wrong_sign_fraction <= 0.1 + 3.0 * std::sqrt(0.1 * 0.9 / 400.0));

  REQUIRE_THROWS_AS(estimate_error_probability(0.4, 0.2, 10, 10, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(estimate_error_probability(0.6, 0.2, 0, 10, 0), std::invalid_argument);
}
