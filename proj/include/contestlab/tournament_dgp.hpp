#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contestlab/darts_engine.hpp"
#include "contestlab/rng.hpp"

namespace contestlab::dgp {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Observable state of a player in one season. latent_skill is the player's
// true per-turn scoring level above the first-nine premium and is never
// exported; ability is the noisy two-season rating the contestants see.
struct PlayerState {
  int id = 0;
  double latent_skill = 0.0;
  double ability = 0.0;
  double world_ranking = 0.0;
  double experience = 0.0;
  int home_city = 0;
};

// Ground-truth effects planted in the per-turn means.
struct TrueEffects {
  double beta_underdog_ratio = -15.075;
  double beta_favorite_ratio = 5.738;
  // Per-half slopes; NaN means "same as the overall slope".
  double beta_underdog_ratio_first_half = kNaN;
  double beta_underdog_ratio_second_half = kNaN;
  double beta_favorite_ratio_first_half = kNaN;
  double beta_favorite_ratio_second_half = kNaN;
  double gamma_headstart_underdog = 0.688;
  // Extra head-start effect per standard deviation of the ability ratio.
  double gamma_headstart_heterogeneity = 0.0;
  double delta_spillover_favorite = -0.563;
  // Favorite performance loading on the twin contest's favorite ability.
  // Makes expected_ability_next endogenous; the instrument is unaffected.
  double spillover_confounding = 0.5;
  double home_effect = 0.5;
  double headstart_prob_underdog = 0.481;

  static TrueEffects zero();
  void validate() const;
};

struct BracketFormat {
  int bracket_size = 32;
  int n_seeded = 8;
  int n_byes = 0;
  // Best-of-k per stage, first stage first.
  std::vector<int> legs_per_stage;
  int count = 1;

  int n_stages() const;
  void validate() const;
};

struct PoolConfig {
  int n_players = 400;
  int n_cities = 25;
  int n_years = 4;
  int first_year = 2016;
  double skill_mean = 91.2;
  double skill_sd = 3.6;
  // Rating deviation: bounded random walk added to latent skill.
  double rating_sd = 2.2;
  double rating_step_sd = 1.0;
  double rating_bound = 6.0;
  // First-nine average exceeds the all-darts average by this much.
  double first9_premium = 7.7;
  int order_of_merit_size = 4000;
  double ranking_noise_sd = 2.0;
  double unranked_share = 0.03;
  double experience_mean = 18.0;
  double experience_sd = 9.0;
  double experience_step_prob = 0.9;

  void validate() const;
};

struct NoiseConfig {
  double per_turn_sd = 26.0;
  // Finish skill at a baseline per-turn mean of 100 and its slope per point,
  // clamped to [0.05, 1].
  double finish_skill = 0.85;
  double finish_slope = 0.03;
  // Contest-level form shock per player.
  double form_sd = 2.0;
  double tournament_sd = 3.0;
  double prize_slope = 0.8;
  double stage_step = 0.2;
  double prize_log_sd = 1.2;

  void validate() const;
};

struct DgpConfig {
  std::vector<BracketFormat> formats;
  PoolConfig pool;
  NoiseConfig noise;
  TrueEffects effects;
  darts::EngineConfig engine;
  // Centring constants for the planted responses.
  double ratio_ref = 1.055;
  double ratio_sd_ref = 0.049;
  double expected_ability_ref = 94.7;
  // Leg index (as a share of best-of-k, rounded up) where per-half effects switch.
  double half_switch_share = 0.4;

  // 10 x 64, 126 x 32 and 16 x 16 draws: 4776 contests.
  static DgpConfig calibrated();
  int n_tournaments() const;
  int n_contests() const;
  void validate() const;
};

DgpConfig dgp_config_from_json(const std::string& text);
std::string dgp_config_to_json(const DgpConfig& config);

// Player states per season: pool[year_index][player_id].
using Pool = std::vector<std::vector<PlayerState>>;
Pool make_pool(const PoolConfig& config, std::uint64_t seed);

// Slot assignment of a single-elimination bracket. slots[i] is a player id or
// -1 for a bye. Slot pairs (2j, 2j+1) meet in the first stage.
struct Bracket {
  std::vector<int> slots;
};

// Slot index of every seed (1-based seed k at position seed_positions[k-1])
// in the standard anchoring that keeps seeds 1 and 2 apart until the final.
std::vector<int> seed_positions(int bracket_size);

// players must be ordered best-first by seeding criterion; the first
// n_seeded are anchored, the top n_byes receive a first-stage bye.
Bracket make_draw(const std::vector<int>& players, int n_seeded, int bracket_size, Rng& rng,
                  int n_byes = 0);

// Play order of the contests in each stage. order[s] lists bracket-order
// contest indices of stage s. Contest j's twin is j ^ 1; its winner meets the
// twin's winner in contest j / 2 of the next stage.
struct Schedule {
  std::vector<std::vector<int>> order;
};

Schedule schedule(int bracket_size, Rng& rng);

struct NextOpponent {
  bool applicable = false;
  double expected_ability = kNaN;
  bool opponent_known = false;
};

// Contest state as seen when a given contest is played.
struct TwinState {
  bool is_bye = false;
  bool finished = false;
  double favorite_ability = kNaN;
  double winner_ability = kNaN;
};

NextOpponent expected_next_ability(bool final_stage, const TwinState& twin);

// Finish skill of a player with the given latent skill.
double finish_skill_of(double latent_skill, const DgpConfig& config);

struct ResponseContext {
  double skill_favorite = 0.0;
  double skill_underdog = 0.0;
  double ability_ratio = 1.0;
  bool underdog_starts = false;
  bool favorite_home = false;
  bool underdog_home = false;
  // NaN in the final stage.
  double expected_ability_next = kNaN;
  double twin_favorite_ability = kNaN;
  // Tournament and stage effects shared by both players.
  double common_shift = 0.0;
  double form_favorite = 0.0;
  double form_underdog = 0.0;
};

struct ResponseMeans {
  double favorite_first = 0.0;
  double favorite_second = 0.0;
  double underdog_first = 0.0;
  double underdog_second = 0.0;
};

ResponseMeans effort_response(const ResponseContext& ctx, const TrueEffects& effects,
                              const DgpConfig& config);

struct ContestRecord {
  int tournament_id = 0;
  int event_id = 0;
  int year = 0;
  int stage = 1;
  int contest_id = 0;
  // Play order within the stage and index in bracket order; the twin
  // contest has bracket_position ^ 1.
  int schedule_position = 0;
  int bracket_position = 0;
  int bracket_size = 0;
  int best_of = 1;
  int favorite_id = 0;
  int underdog_id = 0;
  double favorite_ability = 0.0;
  double underdog_ability = 0.0;
  double ability_ratio = 1.0;
  double ability_difference = 0.0;
  double log_ability_difference = 0.0;
  double performance_favorite = 0.0;
  double performance_underdog = 0.0;
  double performance_mean = 0.0;
  double performance_favorite_first_half = 0.0;
  double performance_favorite_second_half = 0.0;
  double performance_underdog_first_half = 0.0;
  double performance_underdog_second_half = 0.0;
  double performance_mean_first_half = 0.0;
  double performance_mean_second_half = 0.0;
  double first6_favorite = 0.0;
  double first6_underdog = 0.0;
  int favorite_wins = 0;
  double contest_length_fraction = 0.0;
  int legs_played = 0;
  int n_180s = 0;
  int n_100plus = 0;
  int n_140plus = 0;
  int favorite_starts = 0;
  int underdog_starts = 0;
  // NaN in the final stage.
  double expected_ability_next = kNaN;
  double opponent_known = kNaN;
  double twin_favorite_ability = kNaN;
  double favorite_world_ranking = 0.0;
  double underdog_world_ranking = 0.0;
  double favorite_experience = 0.0;
  double underdog_experience = 0.0;
  int favorite_home = 0;
  int underdog_home = 0;
  double prize_money = 0.0;
  // Darts used by the leg winner, one entry per leg.
  std::vector<int> winner_darts;
};

std::vector<ContestRecord> run_tournaments(const DgpConfig& config, std::uint64_t seed);

const std::vector<std::string>& panel_columns();
void export_panel(const std::vector<ContestRecord>& records, std::ostream& out);
void export_panel(const std::vector<ContestRecord>& records, const std::string& path);
std::vector<ContestRecord> import_panel(std::istream& in);
std::vector<ContestRecord> import_panel(const std::string& path);

// Every CSV column except winner_darts as doubles, NaN for empty cells.
std::vector<std::pair<std::string, std::vector<double>>> numeric_columns(
    const std::vector<ContestRecord>& records);

}  // namespace contestlab::dgp
