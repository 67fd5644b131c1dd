#include <algorithm>
#include <numeric>

#include "contestlab/darts_engine.hpp"
#include "contestlab/errors.hpp"
#include "doctest.h"

using namespace contestlab;
using namespace contestlab::darts;

namespace {

ThrowerProfile degenerate(double mean) { return {mean, 1e-9, 1.0}; }

int sum(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); }

}  // namespace

TEST_CASE("simulate_turn basics") {
  Rng rng(7);
  CHECK(simulate_turn(degenerate(100), 501, rng) == 100);

  EngineConfig certain{CheckoutTable::certain(), 60};
  CHECK(simulate_turn(degenerate(100), 40, rng, certain) == 40);

  CHECK_THROWS_AS(simulate_turn(degenerate(100), 1, rng), DomainError);
  CHECK_THROWS_AS(simulate_turn(degenerate(100), 502, rng), DomainError);

  // Far from a finish the generator mean is reproduced.
  ThrowerProfile p{100, 25, 1.0};
  double total = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) total += simulate_turn(p, 501, rng);
  CHECK(total / n == doctest::Approx(100).epsilon(0.005));
}

TEST_CASE("bust scores zero and never overshoots") {
  Rng rng(3);
  EngineConfig never{{0.0, 0.0, 0.0}, 60};
  for (int i = 0; i < 2000; ++i) {
    const int s = simulate_turn(degenerate(60), 50, rng, never);
    CHECK(s == 0);
  }
  ThrowerProfile p{100, 30, 1.0};
  for (int rem = 2; rem <= 200; ++rem) {
    const int s = simulate_turn(p, rem, rng);
    CHECK(s >= 0);
    CHECK(s <= 180);
    CHECK((s == rem || s <= rem - 2));
  }
}

TEST_CASE("nine-dart leg with degenerate 167 profiles") {
  Rng rng(1);
  EngineConfig certain{CheckoutTable::certain(), 60};
  auto leg = simulate_leg(degenerate(167), degenerate(167), Seat::high, rng, certain);
  CHECK(leg.winner == Seat::high);
  CHECK(leg.darts_used_by_winner == 9);
  CHECK(leg.turns_h == std::vector<int>{167, 167, 167});
  CHECK(leg.turns_l.size() == 2);
  CHECK(leg.first9_avg_h == doctest::Approx(167));
  CHECK(leg.first9_avg_l == doctest::Approx(167));
}

TEST_CASE("leg invariants over random legs") {
  Rng rng(11);
  ThrowerProfile a{95, 27, 0.9}, b{103, 27, 1.0};
  for (int i = 0; i < 10000; ++i) {
    auto leg = simulate_leg(a, b, i % 2 ? Seat::low : Seat::high, rng);
    const auto& w = leg.winner == Seat::low ? leg.turns_l : leg.turns_h;
    const auto& l = leg.winner == Seat::low ? leg.turns_h : leg.turns_l;
    REQUIRE(sum(w) == 501);
    REQUIRE(sum(l) < 501);
    REQUIRE(leg.darts_used_by_winner >= 9);
    for (int s : w) REQUIRE((s >= 0 && s <= 180));
    for (int s : l) REQUIRE((s >= 0 && s <= 180));
  }
}

TEST_CASE("stall cap terminates hopeless legs") {
  Rng rng(5);
  EngineConfig never{{0.0, 0.0, 0.0}, 60};
  auto leg = simulate_leg(degenerate(10), degenerate(10), Seat::low, rng, never);
  CHECK(leg.winner == Seat::low);
  CHECK(sum(leg.turns_l) == 501);
  CHECK(leg.turns_l.size() <= 64);
}

TEST_CASE("sd to zero gives first-9 equal to the mean") {
  Rng rng(2);
  auto c = simulate_contest(degenerate(90), degenerate(90), 5, Seat::low, rng);
  CHECK(c.performance_l == doctest::Approx(90));
  CHECK(c.performance_h == doctest::Approx(90));
}

TEST_CASE("starter advantage in legs and contests") {
  Rng rng(99);
  ThrowerProfile p{100, 26, 1.0};
  int starter_wins = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    starter_wins += simulate_leg(p, p, Seat::low, rng).winner == Seat::low;
  CHECK(starter_wins / double(n) > 0.5);
  // Mean of 1e5 Bernoulli(0.5) has sd 0.0016; the leg advantage is far larger.
  CHECK(starter_wins / double(n) > 0.55);

  int contest_wins = 0;
  const int m = 100000;
  for (int i = 0; i < m; ++i)
    contest_wins += simulate_contest(p, p, 11, Seat::high, rng).winner == Seat::high;
  CHECK(contest_wins / double(m) > 0.5 + 3 * 0.0016);
}

TEST_CASE("contest structure") {
  Rng rng(4);
  ThrowerProfile p{100, 26, 1.0};
  CHECK_THROWS_AS(simulate_contest(p, p, 4, Seat::low, rng), ArgumentError);
  CHECK_THROWS_AS(simulate_contest(p, p, 0, Seat::low, rng), ArgumentError);

  auto one = simulate_contest(p, p, 1, Seat::low, rng);
  CHECK(one.legs_played() == 1);
  CHECK(one.contest_length_fraction == doctest::Approx(1.0));
  CHECK(one.winner == one.legs[0].winner);
  CHECK(one.performance_l == doctest::Approx(one.legs[0].first9_avg_l));

  EngineConfig certain{CheckoutTable::certain(), 60};
  for (int k : {1, 3, 7, 11}) {
    auto c = simulate_contest(degenerate(167), degenerate(100), k, Seat::high, rng, certain);
    CHECK(c.winner == Seat::low);
    CHECK(c.legs_won_l == (k + 1) / 2);
    CHECK(c.legs_won_h == 0);
    CHECK(c.contest_length_fraction == doctest::Approx((k + 1) / (2.0 * k)));
    for (int i = 0; i < c.legs_played(); ++i)
      CHECK(c.legs[i].starter == (i % 2 == 0 ? Seat::high : Seat::low));
  }

  for (int i = 0; i < 500; ++i) {
    auto c = simulate_contest(p, p, 9, Seat::low, rng);
    CHECK(std::max(c.legs_won_l, c.legs_won_h) == 5);
    CHECK(c.contest_length_fraction >= 5.0 / 9.0);
    CHECK(c.contest_length_fraction <= 1.0);
  }
}

TEST_CASE("halves share the middle leg for odd leg counts") {
  Rng rng(8);
  ThrowerProfile p{100, 26, 1.0};
  for (int i = 0; i < 200; ++i) {
    auto c = simulate_contest(p, p, 7, Seat::low, rng);
    const int n = c.legs_played();
    double first = 0, second = 0;
    for (int j = 0; j < (n + 1) / 2; ++j) first += c.legs[j].first9_avg_h;
    for (int j = n / 2; j < n; ++j) second += c.legs[j].first9_avg_h;
    CHECK(c.performance_h_first_half == doctest::Approx(first / ((n + 1) / 2)));
    CHECK(c.performance_h_second_half == doctest::Approx(second / (n - n / 2)));
  }
}

TEST_CASE("per-half profiles switch at the configured leg") {
  Rng rng(12);
  ContestProfiles prof{degenerate(80), degenerate(80), degenerate(120), degenerate(120), 2};
  auto c = simulate_contest(prof, 11, Seat::low, rng);
  REQUIRE(c.legs_played() >= 6);
  CHECK(c.legs[0].first9_avg_l == doctest::Approx(80));
  CHECK(c.legs[1].first9_avg_h == doctest::Approx(80));
  CHECK(c.legs[2].first9_avg_l == doctest::Approx(120));
}

TEST_CASE("score band counts") {
  Rng rng(6);
  EngineConfig never{{0.0, 0.0, 0.0}, 3};
  auto c = simulate_contest(degenerate(180), degenerate(150), 1, Seat::low, rng, never);
  // Low: 180, 180, bust, forced 141. High: 150 three times.
  CHECK(c.legs[0].turns_l == std::vector<int>{180, 180, 0, 141});
  CHECK(c.n_180s == 2);
  CHECK(c.n_140plus == 4);
  CHECK(c.n_100plus == 0);
}

TEST_CASE("bull_off frequencies") {
  Rng rng(21);
  const int n = 100000;
  int low = 0;
  for (int i = 0; i < n; ++i) low += bull_off(std::nullopt, rng) == Seat::low;
  CHECK(std::abs(low / double(n) - 0.5) < 0.01);

  for (int i = 0; i < 1000; ++i)
    CHECK(bull_off(BullOffOverride{Seat::low, 1.0}, rng) == Seat::low);

  low = 0;
  for (int i = 0; i < n; ++i) low += bull_off(BullOffOverride{Seat::low, 0.481}, rng) == Seat::low;
  CHECK(std::abs(low / double(n) - 0.481) < 0.01);
}

TEST_CASE("determinism and calibrated median darts") {
  ThrowerProfile a{98, 26, 1.0}, b{102, 26, 1.0};
  Rng r1(42, 17), r2(42, 17);
  auto c1 = simulate_contest(a, b, 11, Seat::low, r1);
  auto c2 = simulate_contest(a, b, 11, Seat::low, r2);
  REQUIRE(c1.legs_played() == c2.legs_played());
  for (int i = 0; i < c1.legs_played(); ++i) {
    CHECK(c1.legs[i].turns_l == c2.legs[i].turns_l);
    CHECK(c1.legs[i].turns_h == c2.legs[i].turns_h);
  }
  CHECK(c1.performance_h == c2.performance_h);

  Rng rng(31);
  std::vector<int> darts;
  for (int i = 0; i < 20000; ++i)
    darts.push_back(simulate_leg(a, b, i % 2 ? Seat::low : Seat::high, rng).darts_used_by_winner);
  std::nth_element(darts.begin(), darts.begin() + darts.size() / 2, darts.end());
  const int median = darts[darts.size() / 2];
  CHECK(median >= 13);
  CHECK(median <= 17);
}
