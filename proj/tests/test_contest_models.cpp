#include <cmath>
#include <sstream>
#include <tuple>

#include "contestlab/contest_models.hpp"
#include "contestlab/errors.hpp"
#include "contestlab/rng.hpp"
#include "doctest.h"

using namespace contestlab;
using namespace contestlab::contest;

namespace {

// Central finite difference of a closed-form effort as a function of theta.
template <class F>
double dtheta(F&& f, double theta, double h = 1e-6) {
  return (f(theta + h) - f(theta - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("win_probability follows the logit success function") {
  auto spec = ContestModelSpec::baseline(1.0);
  auto [p_l, p_h] = win_probability(spec, 0.25, 0.25);
  CHECK(p_h == doctest::Approx(0.5));
  CHECK(p_l + p_h == doctest::Approx(1.0));

  spec = ContestModelSpec::baseline(2.0);
  std::tie(p_l, p_h) = win_probability(spec, 2.0 / 9.0, 2.0 / 9.0);
  CHECK(p_h == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // Monte Carlo draw of contest winners from the success function.
  Rng rng(7);
  int wins = 0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) wins += rng.bernoulli(p_h) ? 1 : 0;
  CHECK(static_cast<double>(wins) / draws == doctest::Approx(2.0 / 3.0).epsilon(0.01));

  std::tie(p_l, p_h) = win_probability(spec, 0.0, 0.0);
  CHECK(p_l == 0.5);
  CHECK(p_h == 0.5);

  CHECK_THROWS_AS(win_probability(spec, -0.1, 0.2), DomainError);
}

TEST_CASE("closed-form equilibria") {
  auto e = equilibrium(ContestModelSpec::baseline(1.0));
  CHECK(e.effort_l == doctest::Approx(0.25));
  CHECK(e.effort_h == doctest::Approx(0.25));

  e = equilibrium(ContestModelSpec::baseline(2.0));
  CHECK(e.effort_l == doctest::Approx(2.0 / 9.0));
  CHECK(e.effort_h == doctest::Approx(2.0 / 9.0));
  CHECK(e.win_prob_h == doctest::Approx(2.0 / 3.0));

  for (double alpha : {0.0, 0.2, 0.7, 1.0}) {
    e = equilibrium(ContestModelSpec::choking(1.0, alpha));
    CHECK(e.effort_l == doctest::Approx(0.25));
    CHECK(e.effort_h == doctest::Approx(0.25));
  }

  // Written-out choking formula with R_l in both denominators.
  const double theta = 1.3, alpha = 0.2, rl = 1.5, rh = 0.8;
  e = equilibrium(ContestModelSpec::choking(theta, alpha, rl, rh));
  const double t1 = std::pow(theta, alpha + 1.0);
  const double denom = (rl + t1 * rh) * (rl + t1 * rh);
  CHECK(e.effort_l == doctest::Approx(t1 * rh * rl * rl / denom).epsilon(1e-12));
  CHECK(e.effort_h ==
        doctest::Approx(std::pow(theta, 2.0 * alpha + 1.0) * rl * rh * rh / denom).epsilon(1e-12));
}

TEST_CASE("model parameter validation") {
  CHECK_THROWS_AS(ContestModelSpec::baseline(0.9), ArgumentError);
  CHECK_THROWS_AS(ContestModelSpec::baseline(1.2, 0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(ContestModelSpec::choking(1.2, -0.1), ArgumentError);
  CHECK_THROWS_AS(variant_from_string("bogus"), ArgumentError);
}

TEST_CASE("first-order-condition residuals") {
  auto spec = ContestModelSpec::baseline(1.0);
  auto [r_l, r_h] = foc_residuals(spec, 0.25, 0.25);
  CHECK(std::abs(r_l) < 1e-12);
  CHECK(std::abs(r_h) < 1e-12);

  std::tie(r_l, r_h) = foc_residuals(spec, 0.5, 0.5);
  CHECK(r_l == doctest::Approx(-0.5));
  CHECK(r_h == doctest::Approx(-0.5));

  spec = ContestModelSpec::choking(1.2, 0.2);
  const auto e = equilibrium(spec);
  std::tie(r_l, r_h) = foc_residuals(spec, e.effort_l, e.effort_h);
  CHECK(std::abs(r_l) <= 1e-10);
  CHECK(std::abs(r_h) <= 1e-10);

  CHECK_THROWS_AS(foc_residuals(spec, 0.0, 0.2), DomainError);
}

TEST_CASE("best_response_oracle") {
  auto spec = ContestModelSpec::baseline(1.0);
  std::vector<double> grid(10001);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 1e-4 * static_cast<double>(i);
  CHECK(best_response_oracle(spec, 0.25, Contestant::low, grid) == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(best_response_oracle(spec, 0.0, Contestant::low, grid) == doctest::Approx(1e-4));

  spec = ContestModelSpec::choking(1.3, 0.2);
  const auto e = equilibrium(spec);
  const auto fine = default_effort_grid(spec);
  const double step = fine[1] - fine[0];
  CHECK(std::abs(best_response_oracle(spec, e.effort_l, Contestant::high, fine) - e.effort_h) <=
        step);

  CHECK_THROWS_AS(best_response_oracle(spec, 0.1, Contestant::low, std::vector<double>{}),
                  ArgumentError);
}

TEST_CASE("nash_oracle agrees with the closed form") {
  const ContestModelSpec specs[] = {
      ContestModelSpec::baseline(1.0),
      ContestModelSpec::baseline(1.5),
      ContestModelSpec::reward_theta_dependent(1.2, 0.2),
  };
  for (const auto& spec : specs) {
    const auto grid = default_effort_grid(spec);
    const double step = grid[1] - grid[0];
    const auto oracle = nash_oracle(spec, grid);
    const auto exact = equilibrium(spec);
    CHECK(std::abs(oracle.effort_l - exact.effort_l) <= step);
    CHECK(std::abs(oracle.effort_h - exact.effort_h) <= step);
  }

  const auto spec = ContestModelSpec::baseline(1.5, 4.0, 0.5);
  CHECK_THROWS_AS(nash_oracle(spec, default_effort_grid(spec), {.max_iterations = 2}),
                  ConvergenceError);
}

TEST_CASE("randomized equilibrium property suite") {
  Rng rng(2024);
  for (int i = 0; i < 60; ++i) {
    const double theta = rng.uniform(1.0, 2.0);
    const double alpha = rng.uniform(0.0, 1.0);
    const double r = rng.uniform(0.5, 4.0);
    const ContestModelSpec specs[] = {
        ContestModelSpec::baseline(theta, r, r),
        ContestModelSpec::reward_scaled(theta, rng.uniform(0.5, 2.0), r),
        ContestModelSpec::reward_theta_dependent(theta, alpha, r),
        ContestModelSpec::choking(theta, alpha, r, r),
    };
    for (const auto& spec : specs) {
      const auto e = equilibrium(spec);
      const auto [r_l, r_h] = foc_residuals(spec, e.effort_l, e.effort_h);
      CHECK(std::abs(r_l) <= 1e-10);
      CHECK(std::abs(r_h) <= 1e-10);
      CHECK(e.win_prob_l + e.win_prob_h == doctest::Approx(1.0));
    }
    // Equal rewards in the baseline: equal efforts and p_h = theta / (1 + theta).
    const auto e = equilibrium(specs[0]);
    CHECK(e.effort_l == doctest::Approx(theta * r / ((1 + theta) * (1 + theta))));
    CHECK(e.effort_h == doctest::Approx(e.effort_l));
    CHECK(e.win_prob_h == doctest::Approx(theta / (1 + theta)));

    // Scaling both rewards scales efforts and leaves p_h unchanged.
    const double c = rng.uniform(0.2, 5.0);
    auto scaled = specs[3];
    scaled.reward_l *= c;
    scaled.reward_h *= c;
    const auto base = equilibrium(specs[3]);
    const auto big = equilibrium(scaled);
    CHECK(big.effort_l == doctest::Approx(c * base.effort_l));
    CHECK(big.effort_h == doctest::Approx(c * base.effort_h));
    CHECK(big.win_prob_h == doctest::Approx(base.win_prob_h));
  }
}

TEST_CASE("effort curve shapes") {
  const auto base = effort_curve(ContestModelSpec::baseline(1.0), 1.5, 101);
  for (std::size_t i = 1; i < base.size(); ++i) {
    CHECK(base[i].effort_l < base[i - 1].effort_l);
    CHECK(base[i].effort_h < base[i - 1].effort_h);
  }

  const auto choke = effort_curve(ContestModelSpec::choking(1.0, 0.2), 2.0, 201);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < choke.size(); ++i) {
    CHECK(choke[i].effort_l < choke[i - 1].effort_l);
    if (choke[i].effort_h > choke[peak].effort_h) peak = i;
  }
  CHECK(peak > 0);
  CHECK(peak + 1 < choke.size());
  for (std::size_t i = 1; i <= peak; ++i) CHECK(choke[i].effort_h > choke[i - 1].effort_h);
  for (std::size_t i = peak + 1; i < choke.size(); ++i)
    CHECK(choke[i].effort_h < choke[i - 1].effort_h);

  // e_l in the reward-scaled model (a = 2) rises up to theta = a, falls after.
  const auto scaled = ContestModelSpec::reward_scaled(1.0, 2.0);
  auto e_l = [&](double t) { return equilibrium(scaled.at_theta(t)).effort_l; };
  CHECK(dtheta(e_l, 1.5) > 0.0);
  CHECK(dtheta(e_l, 1.99) > 0.0);
  CHECK(dtheta(e_l, 2.01) < 0.0);
  CHECK(dtheta(e_l, 2.8) < 0.0);

  CHECK_THROWS_AS(effort_curve(ContestModelSpec::baseline(1.0), 0.9, 10), ArgumentError);
  CHECK_THROWS_AS(effort_curve(ContestModelSpec::baseline(1.0), 2.0, 1), ArgumentError);
}

TEST_CASE("choking peak matches the numerical root of d e_h / d theta") {
  for (double alpha : {0.1, 0.2, 0.5, 1.0}) {
    const auto spec = ContestModelSpec::choking(1.0, alpha);
    auto slope = [&](double t) {
      return dtheta([&](double x) { return equilibrium(spec.at_theta(x)).effort_h; }, t);
    };
    double lo = 1.0 + 1e-4, hi = 4.0;
    REQUIRE(slope(lo) > 0.0);
    REQUIRE(slope(hi) < 0.0);
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(choking_peak_theta(alpha)).epsilon(1e-5));
  }
  CHECK(choking_peak_theta(0.2) == doctest::Approx(1.3237).epsilon(1e-4));
}

TEST_CASE("effort curve CSV") {
  std::ostringstream out;
  write_effort_curve_csv(out, effort_curve(ContestModelSpec::baseline(1.0), 2.0, 3));
  const std::string text = out.str();
  CHECK(text.rfind("theta,e_l,e_h,p_h\n", 0) == 0);
  CHECK(text.find("1,0.25,0.25,0.5\n") != std::string::npos);
}
