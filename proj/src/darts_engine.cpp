#include "contestlab/darts_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contestlab/errors.hpp"

namespace contestlab::darts {

double CheckoutTable::base_rate(int remaining) const {
  if (remaining < 2 || remaining > kMaxCheckout) return 0.0;
  if (remaining <= 40) return band_2_40;
  if (remaining <= 100) return band_41_100;
  return band_101_170;
}

void ThrowerProfile::validate() const {
  if (!(per_turn_mean > 0.0 && per_turn_mean <= kMaxTurnScore))
    throw ArgumentError("per_turn_mean must lie in (0, 180]");
  if (!(per_turn_sd > 0.0)) throw ArgumentError("per_turn_sd must be positive");
  if (!(finish_skill > 0.0 && finish_skill <= 1.0))
    throw ArgumentError("finish_skill must lie in (0, 1]");
}

int simulate_turn(const ThrowerProfile& profile, int remaining, Rng& rng,
                  const EngineConfig& config, bool force_checkout) {
  if (remaining < 2 || remaining > kLegTarget)
    throw DomainError("remaining score must lie in [2, 501]");
  if (remaining <= kMaxCheckout) {
    const double p = profile.finish_skill * config.checkout.base_rate(remaining);
    if (force_checkout || rng.uniform() < p) return remaining;
  }
  const double raw = std::round(rng.normal(profile.per_turn_mean, profile.per_turn_sd));
  const int score = static_cast<int>(std::clamp(raw, 0.0, static_cast<double>(kMaxTurnScore)));
  if (score > remaining - 2) return 0;
  return score;
}

namespace {

double mean_of_first(const std::vector<int>& turns, std::size_t n) {
  const std::size_t m = std::min(n, turns.size());
  if (m == 0) return 0.0;
  return std::accumulate(turns.begin(), turns.begin() + static_cast<long>(m), 0.0) /
         static_cast<double>(m);
}

}  // namespace

LegResult simulate_leg(const ThrowerProfile& profile_l, const ThrowerProfile& profile_h,
                       Seat starter, Rng& rng, const EngineConfig& config) {
  profile_l.validate();
  profile_h.validate();
  LegResult leg;
  leg.starter = starter;
  int remaining_l = kLegTarget;
  int remaining_h = kLegTarget;
  Seat at_oche = starter;
  for (;;) {
    const bool low = at_oche == Seat::low;
    auto& turns = low ? leg.turns_l : leg.turns_h;
    int& remaining = low ? remaining_l : remaining_h;
    const auto& profile = low ? profile_l : profile_h;
    int score = 0;
    if (static_cast<int>(turns.size()) >= config.stall_turns) {
      // Anti-stall: bring the score into range, then check out.
      score = remaining <= kMaxCheckout
                  ? remaining
                  : std::min(kMaxTurnScore, remaining - 2);
    } else {
      score = simulate_turn(profile, remaining, rng, config);
    }
    turns.push_back(score);
    remaining -= score;
    if (remaining == 0) {
      leg.winner = at_oche;
      leg.darts_used_by_winner = 3 * static_cast<int>(turns.size());
      break;
    }
    at_oche = other(at_oche);
  }
  leg.first9_avg_l = mean_of_first(leg.turns_l, 3);
  leg.first9_avg_h = mean_of_first(leg.turns_h, 3);
  leg.first6_avg_l = mean_of_first(leg.turns_l, 2);
  leg.first6_avg_h = mean_of_first(leg.turns_h, 2);
  return leg;
}

ContestResult simulate_contest(const ContestProfiles& profiles, int best_of, Seat first_starter,
                               Rng& rng, const EngineConfig& config) {
  if (best_of < 1 || best_of % 2 == 0) throw ArgumentError("best_of must be odd and >= 1");
  const int needed = (best_of + 1) / 2;
  ContestResult c;
  c.best_of = best_of;
  c.first_starter = first_starter;
  Seat starter = first_starter;
  while (c.legs_won_l < needed && c.legs_won_h < needed) {
    const bool second = static_cast<int>(c.legs.size()) >= profiles.switch_leg &&
                        profiles.switch_leg > 0;
    const auto& pl = second ? profiles.second_l : profiles.first_l;
    const auto& ph = second ? profiles.second_h : profiles.first_h;
    LegResult leg = simulate_leg(pl, ph, starter, rng, config);
    (leg.winner == Seat::low ? c.legs_won_l : c.legs_won_h) += 1;
    for (const auto* turns : {&leg.turns_l, &leg.turns_h}) {
      for (int s : *turns) {
        if (s == kMaxTurnScore) ++c.n_180s;
        else if (s >= 140) ++c.n_140plus;
        else if (s >= 100) ++c.n_100plus;
      }
    }
    c.legs.push_back(std::move(leg));
    starter = other(starter);
  }
  c.winner = c.legs_won_l == needed ? Seat::low : Seat::high;

  const std::size_t n = c.legs.size();
  auto average = [&](std::size_t from, std::size_t to, bool low) {
    double sum = 0.0;
    for (std::size_t i = from; i < to; ++i)
      sum += low ? c.legs[i].first9_avg_l : c.legs[i].first9_avg_h;
    return sum / static_cast<double>(to - from);
  };
  c.performance_l = average(0, n, true);
  c.performance_h = average(0, n, false);
  const std::size_t first_end = (n + 1) / 2;
  const std::size_t second_begin = n / 2;
  c.performance_l_first_half = average(0, first_end, true);
  c.performance_h_first_half = average(0, first_end, false);
  c.performance_l_second_half = average(second_begin, n, true);
  c.performance_h_second_half = average(second_begin, n, false);
  double f6l = 0.0, f6h = 0.0;
  for (const auto& leg : c.legs) {
    f6l += leg.first6_avg_l;
    f6h += leg.first6_avg_h;
  }
  c.first6_l = f6l / static_cast<double>(n);
  c.first6_h = f6h / static_cast<double>(n);
  c.contest_length_fraction = static_cast<double>(n) / static_cast<double>(best_of);
  return c;
}

ContestResult simulate_contest(const ThrowerProfile& profile_l, const ThrowerProfile& profile_h,
                               int best_of, Seat first_starter, Rng& rng,
                               const EngineConfig& config) {
  return simulate_contest(ContestProfiles::constant(profile_l, profile_h), best_of, first_starter,
                          rng, config);
}

Seat bull_off(const std::optional<BullOffOverride>& override_rule, Rng& rng) {
  if (!override_rule) return rng.bernoulli(0.5) ? Seat::low : Seat::high;
  const double p = std::clamp(override_rule->probability, 0.0, 1.0);
  return rng.bernoulli(p) ? override_rule->advantaged : other(override_rule->advantaged);
}

}  // namespace contestlab::darts
