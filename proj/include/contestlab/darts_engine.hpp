#pragma once

#include <optional>
#include <vector>

#include "contestlab/rng.hpp"

namespace contestlab::darts {

inline constexpr int kLegTarget = 501;
inline constexpr int kMaxTurnScore = 180;
inline constexpr int kMaxCheckout = 170;

// Per-turn checkout success before scaling by finish skill, by remaining
// score band. The dart-by-dart double-out geometry is not modelled.
struct CheckoutTable {
  double band_2_40 = 0.70;
  double band_41_100 = 0.50;
  double band_101_170 = 0.20;

  double base_rate(int remaining) const;
  static CheckoutTable certain() { return {1.0, 1.0, 1.0}; }
};

struct EngineConfig {
  CheckoutTable checkout;
  // After this many turns by one player in a leg, the next in-range
  // checkout attempt succeeds.
  int stall_turns = 60;
};

// Latent generator of a player's three-dart turn scores.
struct ThrowerProfile {
  double per_turn_mean = 100.0;
  double per_turn_sd = 27.0;
  double finish_skill = 1.0;

  void validate() const;
};

enum class Seat { low, high };

constexpr Seat other(Seat s) { return s == Seat::low ? Seat::high : Seat::low; }

struct LegResult {
  Seat starter = Seat::low;
  Seat winner = Seat::low;
  std::vector<int> turns_l;
  std::vector<int> turns_h;
  // Full three-dart visits of the winner, including the checkout visit.
  int darts_used_by_winner = 0;
  // Mean turn score over the first min(3, turns thrown) turns.
  double first9_avg_l = 0.0;
  double first9_avg_h = 0.0;
  // Same over the first min(2, turns thrown) turns.
  double first6_avg_l = 0.0;
  double first6_avg_h = 0.0;
};

struct ContestResult {
  Seat winner = Seat::low;
  Seat first_starter = Seat::low;
  int best_of = 1;
  int legs_won_l = 0;
  int legs_won_h = 0;
  std::vector<LegResult> legs;
  // Mean over legs of the per-leg first-9 averages.
  double performance_l = 0.0;
  double performance_h = 0.0;
  // First half: legs [0, ceil(L/2)); second half: legs [floor(L/2), L) for L
  // realized legs. With odd L the middle leg belongs to both halves.
  double performance_l_first_half = 0.0;
  double performance_h_first_half = 0.0;
  double performance_l_second_half = 0.0;
  double performance_h_second_half = 0.0;
  double first6_l = 0.0;
  double first6_h = 0.0;
  // Turn-score counts over both players: 180s, [100, 140) and [140, 180).
  int n_180s = 0;
  int n_100plus = 0;
  int n_140plus = 0;
  double contest_length_fraction = 0.0;

  int legs_played() const { return static_cast<int>(legs.size()); }
};

// Profiles for both contestants, optionally changing from a given leg index on.
struct ContestProfiles {
  ThrowerProfile first_l;
  ThrowerProfile first_h;
  ThrowerProfile second_l;
  ThrowerProfile second_h;
  int switch_leg = 0;

  static ContestProfiles constant(const ThrowerProfile& l, const ThrowerProfile& h) {
    return {l, h, l, h, 0};
  }
};

// Score of one three-dart turn with `remaining` points left (2..501). A
// turn that finishes scores exactly `remaining`; any other turn leaves at
// least 2 points (an overshooting turn is a bust and scores 0).
int simulate_turn(const ThrowerProfile& profile, int remaining, Rng& rng,
                  const EngineConfig& config = {}, bool force_checkout = false);

LegResult simulate_leg(const ThrowerProfile& profile_l, const ThrowerProfile& profile_h,
                       Seat starter, Rng& rng, const EngineConfig& config = {});

// Best-of-k legs with the starter alternating each leg from first_starter.
ContestResult simulate_contest(const ContestProfiles& profiles, int best_of, Seat first_starter,
                               Rng& rng, const EngineConfig& config = {});

ContestResult simulate_contest(const ThrowerProfile& profile_l, const ThrowerProfile& profile_h,
                               int best_of, Seat first_starter, Rng& rng,
                               const EngineConfig& config = {});

struct BullOffOverride {
  Seat advantaged = Seat::low;
  double probability = 0.5;
};

// Pre-contest one-dart shootout deciding who starts the first leg.
Seat bull_off(const std::optional<BullOffOverride>& override_rule, Rng& rng);

}  // namespace contestlab::darts
