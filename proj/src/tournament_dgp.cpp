#include "contestlab/tournament_dgp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "contestlab/errors.hpp"
#include "contestlab/parallel.hpp"
#include "json_util.hpp"

namespace contestlab::dgp {

namespace {

bool is_pow2(int n) { return n >= 2 && (n & (n - 1)) == 0; }

double pick(double half, double overall) { return std::isnan(half) ? overall : half; }

}  // namespace

TrueEffects TrueEffects::zero() {
  TrueEffects e;
  e.beta_underdog_ratio = 0.0;
  e.beta_favorite_ratio = 0.0;
  e.gamma_headstart_underdog = 0.0;
  e.gamma_headstart_heterogeneity = 0.0;
  e.delta_spillover_favorite = 0.0;
  e.spillover_confounding = 0.0;
  e.home_effect = 0.0;
  e.headstart_prob_underdog = 0.5;
  return e;
}

void TrueEffects::validate() const {
  for (double v : {beta_underdog_ratio, beta_favorite_ratio, gamma_headstart_underdog,
                   gamma_headstart_heterogeneity, delta_spillover_favorite,
                   spillover_confounding, home_effect})
    if (!std::isfinite(v)) throw ArgumentError("true effects must be finite");
  for (double v : {beta_underdog_ratio_first_half, beta_underdog_ratio_second_half,
                   beta_favorite_ratio_first_half, beta_favorite_ratio_second_half})
    if (std::isinf(v)) throw ArgumentError("per-half effects must be finite or unset");
  if (!(headstart_prob_underdog >= 0.0 && headstart_prob_underdog <= 1.0))
    throw ArgumentError("headstart_prob_underdog must lie in [0, 1]");
}

int BracketFormat::n_stages() const {
  int s = 0;
  for (int b = bracket_size; b > 1; b /= 2) ++s;
  return s;
}

void BracketFormat::validate() const {
  if (!is_pow2(bracket_size)) throw ArgumentError("bracket_size must be a power of two >= 2");
  if (n_seeded < 0 || n_seeded > bracket_size / 2)
    throw ArgumentError("n_seeded must lie in [0, bracket_size / 2]");
  if (n_byes < 0 || n_byes > n_seeded) throw ArgumentError("n_byes must lie in [0, n_seeded]");
  if (static_cast<int>(legs_per_stage.size()) != n_stages())
    throw ArgumentError("legs_per_stage needs one entry per stage");
  for (int k : legs_per_stage)
    if (k < 1 || k % 2 == 0) throw ArgumentError("legs per stage must be odd and >= 1");
  if (count < 0) throw ArgumentError("format count must be non-negative");
}

void PoolConfig::validate() const {
  if (n_players < 2) throw ArgumentError("pool needs at least two players");
  if (n_cities < 1 || n_years < 1) throw ArgumentError("n_cities and n_years must be positive");
  if (!(skill_sd >= 0 && rating_sd >= 0 && rating_step_sd >= 0 && rating_bound >= 0 &&
        ranking_noise_sd >= 0 && experience_sd >= 0))
    throw ArgumentError("pool standard deviations must be non-negative");
  if (order_of_merit_size < n_players) throw ArgumentError("order_of_merit_size < n_players");
  if (!(unranked_share >= 0 && unranked_share <= 1 && experience_step_prob >= 0 &&
        experience_step_prob <= 1))
    throw ArgumentError("pool shares must lie in [0, 1]");
}

void NoiseConfig::validate() const {
  if (!(per_turn_sd > 0)) throw ArgumentError("per_turn_sd must be positive");
  if (!(finish_skill > 0 && finish_skill <= 1)) throw ArgumentError("finish_skill in (0, 1]");
  if (!std::isfinite(finish_slope)) throw ArgumentError("finish_slope must be finite");
  if (!(form_sd >= 0 && tournament_sd >= 0 && prize_log_sd >= 0))
    throw ArgumentError("noise standard deviations must be non-negative");
}

DgpConfig DgpConfig::calibrated() {
  DgpConfig c;
  c.formats = {
      {64, 16, 0, {11, 11, 11, 11, 11, 15}, 10},
      {32, 8, 0, {11, 11, 13, 15, 19}, 126},
      {16, 4, 0, {11, 15, 17, 21}, 16},
  };
  return c;
}

int DgpConfig::n_tournaments() const {
  int n = 0;
  for (const auto& f : formats) n += f.count;
  return n;
}

int DgpConfig::n_contests() const {
  int n = 0;
  for (const auto& f : formats) n += f.count * (f.bracket_size - 1 - f.n_byes);
  return n;
}

void DgpConfig::validate() const {
  if (formats.empty()) throw ArgumentError("at least one bracket format is required");
  for (const auto& f : formats) {
    f.validate();
    if (f.bracket_size - f.n_byes > pool.n_players)
      throw ArgumentError("bracket larger than the player pool");
  }
  pool.validate();
  noise.validate();
  effects.validate();
  if (!(ratio_sd_ref > 0)) throw ArgumentError("ratio_sd_ref must be positive");
  if (!(half_switch_share > 0 && half_switch_share <= 1))
    throw ArgumentError("half_switch_share must lie in (0, 1]");
}

// ---------------------------------------------------------------- JSON

namespace {

using detail::json;
using detail::ObjectReader;

json nan_to_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

DgpConfig dgp_config_from_json(const std::string& text) {
  const json doc = detail::parse_json(text);
  DgpConfig c = DgpConfig::calibrated();
  ObjectReader top(doc, "dgp");
  if (top.has("formats")) {
    const json& arr = top.child("formats");
    if (!arr.is_array()) throw ArgumentError("dgp.formats: expected an array");
    c.formats.clear();
    for (const auto& item : arr) {
      BracketFormat f;
      ObjectReader r(item, "dgp.formats[]");
      r.get("bracket_size", f.bracket_size);
      r.get("n_seeded", f.n_seeded);
      r.get("n_byes", f.n_byes);
      r.get("legs_per_stage", f.legs_per_stage);
      r.get("count", f.count);
      r.finish();
      c.formats.push_back(f);
    }
  }
  if (top.has("pool")) {
    auto& p = c.pool;
    ObjectReader r(top.child("pool"), "dgp.pool");
    r.get("n_players", p.n_players);
    r.get("n_cities", p.n_cities);
    r.get("n_years", p.n_years);
    r.get("first_year", p.first_year);
    r.get("skill_mean", p.skill_mean);
    r.get("skill_sd", p.skill_sd);
    r.get("rating_sd", p.rating_sd);
    r.get("rating_step_sd", p.rating_step_sd);
    r.get("rating_bound", p.rating_bound);
    r.get("first9_premium", p.first9_premium);
    r.get("order_of_merit_size", p.order_of_merit_size);
    r.get("ranking_noise_sd", p.ranking_noise_sd);
    r.get("unranked_share", p.unranked_share);
    r.get("experience_mean", p.experience_mean);
    r.get("experience_sd", p.experience_sd);
    r.get("experience_step_prob", p.experience_step_prob);
    r.finish();
  }
  if (top.has("noise")) {
    auto& n = c.noise;
    ObjectReader r(top.child("noise"), "dgp.noise");
    r.get("per_turn_sd", n.per_turn_sd);
    r.get("finish_skill", n.finish_skill);
    r.get("finish_slope", n.finish_slope);
    r.get("form_sd", n.form_sd);
    r.get("tournament_sd", n.tournament_sd);
    r.get("prize_slope", n.prize_slope);
    r.get("stage_step", n.stage_step);
    r.get("prize_log_sd", n.prize_log_sd);
    r.finish();
  }
  if (top.has("effects")) {
    const json& ej = top.child("effects");
    if (ej.is_string()) {
      if (ej.get<std::string>() != "zero")
        throw ArgumentError("dgp.effects: only the string \"zero\" is recognized");
      c.effects = TrueEffects::zero();
    } else {
      auto& e = c.effects;
      ObjectReader r(ej, "dgp.effects");
      r.get("beta_underdog_ratio", e.beta_underdog_ratio);
      r.get("beta_favorite_ratio", e.beta_favorite_ratio);
      r.get("beta_underdog_ratio_first_half", e.beta_underdog_ratio_first_half);
      r.get("beta_underdog_ratio_second_half", e.beta_underdog_ratio_second_half);
      r.get("beta_favorite_ratio_first_half", e.beta_favorite_ratio_first_half);
      r.get("beta_favorite_ratio_second_half", e.beta_favorite_ratio_second_half);
      r.get("gamma_headstart_underdog", e.gamma_headstart_underdog);
      r.get("gamma_headstart_heterogeneity", e.gamma_headstart_heterogeneity);
      r.get("delta_spillover_favorite", e.delta_spillover_favorite);
      r.get("spillover_confounding", e.spillover_confounding);
      r.get("home_effect", e.home_effect);
      r.get("headstart_prob_underdog", e.headstart_prob_underdog);
      r.finish();
    }
  }
  if (top.has("engine")) {
    auto& g = c.engine;
    ObjectReader r(top.child("engine"), "dgp.engine");
    r.get("checkout_2_40", g.checkout.band_2_40);
    r.get("checkout_41_100", g.checkout.band_41_100);
    r.get("checkout_101_170", g.checkout.band_101_170);
    r.get("stall_turns", g.stall_turns);
    r.finish();
  }
  top.get("ratio_ref", c.ratio_ref);
  top.get("ratio_sd_ref", c.ratio_sd_ref);
  top.get("expected_ability_ref", c.expected_ability_ref);
  top.get("half_switch_share", c.half_switch_share);
  top.finish();
  c.validate();
  return c;
}

std::string dgp_config_to_json(const DgpConfig& c) {
  json doc;
  doc["formats"] = json::array();
  for (const auto& f : c.formats)
    doc["formats"].push_back({{"bracket_size", f.bracket_size},
                              {"n_seeded", f.n_seeded},
                              {"n_byes", f.n_byes},
                              {"legs_per_stage", f.legs_per_stage},
                              {"count", f.count}});
  const auto& p = c.pool;
  doc["pool"] = {{"n_players", p.n_players},
                 {"n_cities", p.n_cities},
                 {"n_years", p.n_years},
                 {"first_year", p.first_year},
                 {"skill_mean", p.skill_mean},
                 {"skill_sd", p.skill_sd},
                 {"rating_sd", p.rating_sd},
                 {"rating_step_sd", p.rating_step_sd},
                 {"rating_bound", p.rating_bound},
                 {"first9_premium", p.first9_premium},
                 {"order_of_merit_size", p.order_of_merit_size},
                 {"ranking_noise_sd", p.ranking_noise_sd},
                 {"unranked_share", p.unranked_share},
                 {"experience_mean", p.experience_mean},
                 {"experience_sd", p.experience_sd},
                 {"experience_step_prob", p.experience_step_prob}};
  const auto& n = c.noise;
  doc["noise"] = {{"per_turn_sd", n.per_turn_sd},     {"finish_skill", n.finish_skill},
                  {"finish_slope", n.finish_slope},
                  {"form_sd", n.form_sd},             {"tournament_sd", n.tournament_sd},
                  {"prize_slope", n.prize_slope},     {"stage_step", n.stage_step},
                  {"prize_log_sd", n.prize_log_sd}};
  const auto& e = c.effects;
  doc["effects"] = {
      {"beta_underdog_ratio", e.beta_underdog_ratio},
      {"beta_favorite_ratio", e.beta_favorite_ratio},
      {"beta_underdog_ratio_first_half", nan_to_null(e.beta_underdog_ratio_first_half)},
      {"beta_underdog_ratio_second_half", nan_to_null(e.beta_underdog_ratio_second_half)},
      {"beta_favorite_ratio_first_half", nan_to_null(e.beta_favorite_ratio_first_half)},
      {"beta_favorite_ratio_second_half", nan_to_null(e.beta_favorite_ratio_second_half)},
      {"gamma_headstart_underdog", e.gamma_headstart_underdog},
      {"gamma_headstart_heterogeneity", e.gamma_headstart_heterogeneity},
      {"delta_spillover_favorite", e.delta_spillover_favorite},
      {"spillover_confounding", e.spillover_confounding},
      {"home_effect", e.home_effect},
      {"headstart_prob_underdog", e.headstart_prob_underdog}};
  doc["engine"] = {{"checkout_2_40", c.engine.checkout.band_2_40},
                   {"checkout_41_100", c.engine.checkout.band_41_100},
                   {"checkout_101_170", c.engine.checkout.band_101_170},
                   {"stall_turns", c.engine.stall_turns}};
  doc["ratio_ref"] = c.ratio_ref;
  doc["ratio_sd_ref"] = c.ratio_sd_ref;
  doc["expected_ability_ref"] = c.expected_ability_ref;
  doc["half_switch_share"] = c.half_switch_share;
  return doc.dump(2);
}

// ---------------------------------------------------------------- pool

Pool make_pool(const PoolConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed, 0x706f6f6cULL);
  const int n = cfg.n_players;
  std::vector<double> skill(n), dev(n), exper(n);
  std::vector<int> city(n);
  std::vector<char> unranked(n);
  for (int i = 0; i < n; ++i) {
    skill[i] = rng.normal(cfg.skill_mean, cfg.skill_sd);
    dev[i] = std::clamp(rng.normal(0.0, cfg.rating_sd), -cfg.rating_bound, cfg.rating_bound);
    exper[i] = std::max(0.0, std::round(rng.normal(cfg.experience_mean, cfg.experience_sd)));
    city[i] = static_cast<int>(rng.index(static_cast<std::size_t>(cfg.n_cities)));
    unranked[i] = rng.bernoulli(cfg.unranked_share);
  }
  Pool pool(static_cast<std::size_t>(cfg.n_years));
  for (int y = 0; y < cfg.n_years; ++y) {
    if (y > 0) {
      for (int i = 0; i < n; ++i) {
        dev[i] = std::clamp(dev[i] + rng.normal(0.0, cfg.rating_step_sd), -cfg.rating_bound,
                            cfg.rating_bound);
        if (rng.bernoulli(cfg.experience_step_prob)) exper[i] += 1.0;
      }
    }
    auto& season = pool[static_cast<std::size_t>(y)];
    season.resize(static_cast<std::size_t>(n));
    std::vector<double> merit(n);
    for (int i = 0; i < n; ++i) {
      auto& p = season[static_cast<std::size_t>(i)];
      p.id = i;
      p.latent_skill = skill[i];
      p.ability = std::clamp(skill[i] + dev[i], 60.0, 120.0);
      p.experience = exper[i];
      p.home_city = city[i];
      merit[i] = p.ability + rng.normal(0.0, cfg.ranking_noise_sd);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return merit[a] > merit[b]; });
    for (int r = 0; r < n; ++r) {
      auto& p = season[static_cast<std::size_t>(order[r])];
      p.world_ranking = unranked[order[r]]
                            ? 1.0
                            : static_cast<double>(r) / (cfg.order_of_merit_size - 1);
    }
  }
  return pool;
}

// ---------------------------------------------------------------- bracket

std::vector<int> seed_positions(int bracket_size) {
  if (!is_pow2(bracket_size)) throw ArgumentError("bracket_size must be a power of two >= 2");
  // seed_at[i] is the seed number placed at slot i.
  std::vector<int> seed_at{1, 2};
  while (static_cast<int>(seed_at.size()) < bracket_size) {
    const int m = 2 * static_cast<int>(seed_at.size()) + 1;
    std::vector<int> next;
    next.reserve(seed_at.size() * 2);
    for (int s : seed_at) {
      next.push_back(s);
      next.push_back(m - s);
    }
    seed_at.swap(next);
  }
  std::vector<int> pos(static_cast<std::size_t>(bracket_size));
  for (int i = 0; i < bracket_size; ++i) pos[static_cast<std::size_t>(seed_at[i] - 1)] = i;
  return pos;
}

Bracket make_draw(const std::vector<int>& players, int n_seeded, int bracket_size, Rng& rng,
                  int n_byes) {
  if (!is_pow2(bracket_size)) throw ArgumentError("bracket_size must be a power of two >= 2");
  if (n_seeded < 0 || n_seeded > bracket_size / 2)
    throw ArgumentError("n_seeded must lie in [0, bracket_size / 2]");
  if (n_byes < 0 || n_byes > n_seeded) throw ArgumentError("n_byes must lie in [0, n_seeded]");
  if (static_cast<int>(players.size()) != bracket_size - n_byes)
    throw ArgumentError("draw needs bracket_size - n_byes players");
  const auto pos = seed_positions(bracket_size);
  Bracket b;
  b.slots.assign(static_cast<std::size_t>(bracket_size), -2);
  for (int k = 0; k < n_seeded; ++k) b.slots[static_cast<std::size_t>(pos[k])] = players[k];
  for (int k = 0; k < n_byes; ++k) b.slots[static_cast<std::size_t>(pos[k] ^ 1)] = -1;
  std::vector<int> rest(players.begin() + n_seeded, players.end());
  std::shuffle(rest.begin(), rest.end(), rng.engine());
  std::size_t next = 0;
  for (auto& s : b.slots)
    if (s == -2) s = rest[next++];
  return b;
}

Schedule schedule(int bracket_size, Rng& rng) {
  if (!is_pow2(bracket_size)) throw ArgumentError("bracket_size must be a power of two >= 2");
  Schedule s;
  for (int contests = bracket_size / 2; contests >= 1; contests /= 2) {
    std::vector<int> order(static_cast<std::size_t>(contests));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    s.order.push_back(std::move(order));
  }
  return s;
}

NextOpponent expected_next_ability(bool final_stage, const TwinState& twin) {
  NextOpponent out;
  if (final_stage) return out;
  out.applicable = true;
  if (twin.is_bye || twin.finished) {
    out.opponent_known = true;
    out.expected_ability = twin.winner_ability;
  } else {
    out.expected_ability = twin.favorite_ability;
  }
  return out;
}

double finish_skill_of(double latent_skill, const DgpConfig& config) {
  const double base = latent_skill + config.pool.first9_premium;
  return std::clamp(config.noise.finish_skill + config.noise.finish_slope * (base - 100.0), 0.05,
                    1.0);
}

ResponseMeans effort_response(const ResponseContext& ctx, const TrueEffects& e,
                              const DgpConfig& config) {
  const double excess = ctx.ability_ratio - 1.0;
  const double premium = config.pool.first9_premium;
  const double fav_base = ctx.skill_favorite + premium + ctx.common_shift + ctx.form_favorite +
                          (ctx.favorite_home ? e.home_effect : 0.0);
  const double und_base = ctx.skill_underdog + premium + ctx.common_shift + ctx.form_underdog +
                          (ctx.underdog_home ? e.home_effect : 0.0);
  double spill = 0.0;
  if (!std::isnan(ctx.expected_ability_next)) {
    spill = e.delta_spillover_favorite * (ctx.expected_ability_next - config.expected_ability_ref) +
            e.spillover_confounding * (ctx.twin_favorite_ability - config.expected_ability_ref);
  }
  double head = 0.0;
  if (ctx.underdog_starts) {
    const double z = (ctx.ability_ratio - config.ratio_ref) / config.ratio_sd_ref;
    head = e.gamma_headstart_underdog + e.gamma_headstart_heterogeneity * z;
  }
  ResponseMeans m;
  m.favorite_first = fav_base + spill +
                     pick(e.beta_favorite_ratio_first_half, e.beta_favorite_ratio) * excess;
  m.favorite_second = fav_base + spill +
                      pick(e.beta_favorite_ratio_second_half, e.beta_favorite_ratio) * excess;
  m.underdog_first = und_base + head +
                     pick(e.beta_underdog_ratio_first_half, e.beta_underdog_ratio) * excess;
  m.underdog_second = und_base + head +
                      pick(e.beta_underdog_ratio_second_half, e.beta_underdog_ratio) * excess;
  return m;
}

// ---------------------------------------------------------------- simulation

namespace {

struct TournamentPlan {
  int tournament_id = 0;
  int event_id = 0;
  int year_index = 0;
  const BracketFormat* format = nullptr;
  double prize = 0.0;
  double effect = 0.0;
};

std::vector<TournamentPlan> plan_tournaments(const DgpConfig& config, std::uint64_t seed) {
  std::vector<TournamentPlan> plans;
  for (const auto& f : config.formats)
    for (int i = 0; i < f.count; ++i) {
      TournamentPlan p;
      p.format = &f;
      plans.push_back(p);
    }
  const int total = static_cast<int>(plans.size());
  const int years = config.pool.n_years;
  // Interleave formats over seasons so each year holds a similar mix.
  std::vector<int> per_year(static_cast<std::size_t>(years), 0);
  for (int i = 0; i < total; ++i) {
    plans[i].tournament_id = i;
    plans[i].year_index = i % years;
    plans[i].event_id = per_year[static_cast<std::size_t>(i % years)]++;
  }
  Rng rng(seed, 0x7072697aULL);
  std::vector<double> raw(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    raw[i] = std::exp(rng.normal(0.0, config.noise.prize_log_sd));
    plans[i].effect = rng.normal(0.0, config.noise.tournament_sd);
  }
  for (int y = 0; y < years; ++y) {
    double lo = INFINITY, hi = -INFINITY;
    for (int i = y; i < total; i += years) {
      lo = std::min(lo, raw[i]);
      hi = std::max(hi, raw[i]);
    }
    for (int i = y; i < total; i += years) {
      plans[i].prize = hi > lo ? (raw[i] - lo) / (hi - lo) : 0.0;
      plans[i].effect += config.noise.prize_slope * (plans[i].prize - 0.5);
    }
  }
  return plans;
}

struct PlayedContest {
  bool played = false;
  bool is_bye = false;
  int winner = -1;
  double favorite_ability = kNaN;
  double winner_ability = kNaN;
};

std::vector<ContestRecord> simulate_tournament(const DgpConfig& config, const Pool& pool,
                                               const TournamentPlan& plan, std::uint64_t seed) {
  const auto& fmt = *plan.format;
  const auto& season = pool[static_cast<std::size_t>(plan.year_index)];
  Rng rng(seed, 0x1000ULL + static_cast<std::uint64_t>(plan.tournament_id));

  const int city = static_cast<int>(rng.index(static_cast<std::size_t>(config.pool.n_cities)));
  const int n_entrants = fmt.bracket_size - fmt.n_byes;
  std::vector<int> ids(season.size());
  std::iota(ids.begin(), ids.end(), 0);
  for (int i = 0; i < n_entrants; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) + rng.index(ids.size() - i);
    std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(n_entrants));
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    const auto& pa = season[static_cast<std::size_t>(a)];
    const auto& pb = season[static_cast<std::size_t>(b)];
    if (pa.world_ranking != pb.world_ranking) return pa.world_ranking < pb.world_ranking;
    if (pa.ability != pb.ability) return pa.ability > pb.ability;
    return a < b;
  });
  const Bracket bracket = make_draw(ids, fmt.n_seeded, fmt.bracket_size, rng, fmt.n_byes);
  const Schedule sched = schedule(fmt.bracket_size, rng);
  const darts::BullOffOverride bull{darts::Seat::low, config.effects.headstart_prob_underdog};

  std::vector<ContestRecord> records;
  std::vector<int> slots = bracket.slots;
  const int n_stages = fmt.n_stages();
  for (int stage = 0; stage < n_stages; ++stage) {
    const int n_contests = static_cast<int>(slots.size()) / 2;
    const bool final_stage = stage == n_stages - 1;
    const int k = fmt.legs_per_stage[static_cast<std::size_t>(stage)];
    std::vector<PlayedContest> state(static_cast<std::size_t>(n_contests));
    for (int j = 0; j < n_contests; ++j) {
      const int a = slots[2 * j], b = slots[2 * j + 1];
      auto& st = state[static_cast<std::size_t>(j)];
      if (a < 0 || b < 0) {
        st.is_bye = true;
        st.played = true;
        st.winner = a < 0 ? b : a;
        st.winner_ability = season[static_cast<std::size_t>(st.winner)].ability;
        st.favorite_ability = st.winner_ability;
      } else {
        st.favorite_ability = std::max(season[static_cast<std::size_t>(a)].ability,
                                       season[static_cast<std::size_t>(b)].ability);
      }
    }
    const auto& order = sched.order[static_cast<std::size_t>(stage)];
    int position = 0;
    for (int j : order) {
      auto& st = state[static_cast<std::size_t>(j)];
      if (st.is_bye) continue;
      const int a = slots[2 * j], b = slots[2 * j + 1];
      const auto& pa = season[static_cast<std::size_t>(a)];
      const auto& pb = season[static_cast<std::size_t>(b)];
      const bool a_fav = pa.ability > pb.ability || (pa.ability == pb.ability && a < b);
      const auto& fav = a_fav ? pa : pb;
      const auto& und = a_fav ? pb : pa;

      TwinState twin;
      if (!final_stage) {
        const auto& ts = state[static_cast<std::size_t>(j ^ 1)];
        twin.is_bye = ts.is_bye;
        twin.finished = ts.played;
        twin.favorite_ability = ts.favorite_ability;
        twin.winner_ability = ts.winner_ability;
      }
      const NextOpponent next = expected_next_ability(final_stage, twin);

      const darts::Seat starter = darts::bull_off(bull, rng);
      ResponseContext ctx;
      ctx.skill_favorite = fav.latent_skill;
      ctx.skill_underdog = und.latent_skill;
      ctx.ability_ratio = fav.ability / und.ability;
      ctx.underdog_starts = starter == darts::Seat::low;
      ctx.favorite_home = fav.home_city == city;
      ctx.underdog_home = und.home_city == city;
      ctx.expected_ability_next = next.applicable ? next.expected_ability : kNaN;
      ctx.twin_favorite_ability = next.applicable ? twin.favorite_ability : kNaN;
      ctx.common_shift = plan.effect + config.noise.stage_step * stage;
      ctx.form_favorite = rng.normal(0.0, config.noise.form_sd);
      ctx.form_underdog = rng.normal(0.0, config.noise.form_sd);
      const ResponseMeans m = effort_response(ctx, config.effects, config);

      const double finish_f = finish_skill_of(fav.latent_skill, config);
      const double finish_u = finish_skill_of(und.latent_skill, config);
      auto profile = [&](double mean, double finish) {
        return darts::ThrowerProfile{std::clamp(mean, 1.0, 180.0), config.noise.per_turn_sd,
                                     finish};
      };
      darts::ContestProfiles prof{profile(m.underdog_first, finish_u),
                                  profile(m.favorite_first, finish_f),
                                  profile(m.underdog_second, finish_u),
                                  profile(m.favorite_second, finish_f),
                                  static_cast<int>(std::ceil(config.half_switch_share * k))};
      const auto res = darts::simulate_contest(prof, k, starter, rng, config.engine);

      ContestRecord r;
      r.tournament_id = plan.tournament_id;
      r.event_id = plan.event_id;
      r.year = config.pool.first_year + plan.year_index;
      r.stage = stage + 1;
      r.schedule_position = position++;
      r.bracket_position = j;
      r.bracket_size = fmt.bracket_size;
      r.best_of = k;
      r.favorite_id = fav.id;
      r.underdog_id = und.id;
      r.favorite_ability = fav.ability;
      r.underdog_ability = und.ability;
      r.ability_ratio = ctx.ability_ratio;
      r.ability_difference = fav.ability - und.ability;
      r.log_ability_difference = std::log(fav.ability) - std::log(und.ability);
      r.performance_favorite = res.performance_h;
      r.performance_underdog = res.performance_l;
      r.performance_mean = 0.5 * (res.performance_h + res.performance_l);
      r.performance_favorite_first_half = res.performance_h_first_half;
      r.performance_favorite_second_half = res.performance_h_second_half;
      r.performance_underdog_first_half = res.performance_l_first_half;
      r.performance_underdog_second_half = res.performance_l_second_half;
      r.performance_mean_first_half =
          0.5 * (res.performance_h_first_half + res.performance_l_first_half);
      r.performance_mean_second_half =
          0.5 * (res.performance_h_second_half + res.performance_l_second_half);
      r.first6_favorite = res.first6_h;
      r.first6_underdog = res.first6_l;
      r.favorite_wins = res.winner == darts::Seat::high;
      r.contest_length_fraction = res.contest_length_fraction;
      r.legs_played = res.legs_played();
      r.n_180s = res.n_180s;
      r.n_100plus = res.n_100plus;
      r.n_140plus = res.n_140plus;
      r.favorite_starts = starter == darts::Seat::high;
      r.underdog_starts = starter == darts::Seat::low;
      if (next.applicable) {
        r.expected_ability_next = next.expected_ability;
        r.opponent_known = next.opponent_known ? 1.0 : 0.0;
        r.twin_favorite_ability = twin.favorite_ability;
      }
      r.favorite_world_ranking = fav.world_ranking;
      r.underdog_world_ranking = und.world_ranking;
      r.favorite_experience = fav.experience;
      r.underdog_experience = und.experience;
      r.favorite_home = ctx.favorite_home;
      r.underdog_home = ctx.underdog_home;
      r.prize_money = plan.prize;
      r.winner_darts.reserve(res.legs.size());
      for (const auto& leg : res.legs) r.winner_darts.push_back(leg.darts_used_by_winner);
      records.push_back(std::move(r));

      st.played = true;
      st.winner = res.winner == darts::Seat::high ? fav.id : und.id;
      st.winner_ability = season[static_cast<std::size_t>(st.winner)].ability;
    }
    std::vector<int> next_slots(static_cast<std::size_t>(n_contests));
    for (int j = 0; j < n_contests; ++j)
      next_slots[static_cast<std::size_t>(j)] = state[static_cast<std::size_t>(j)].winner;
    slots.swap(next_slots);
  }
  return records;
}

}  // namespace

std::vector<ContestRecord> run_tournaments(const DgpConfig& config, std::uint64_t seed) {
  config.validate();
  const Pool pool = make_pool(config.pool, seed);
  const auto plans = plan_tournaments(config, seed);
  std::vector<std::vector<ContestRecord>> per(plans.size());
  parallel_for(plans.size(), [&](std::size_t i) {
    per[i] = simulate_tournament(config, pool, plans[i], seed);
  });
  std::vector<ContestRecord> out;
  out.reserve(static_cast<std::size_t>(config.n_contests()));
  for (auto& v : per)
    for (auto& r : v) {
      r.contest_id = static_cast<int>(out.size());
      out.push_back(std::move(r));
    }
  return out;
}

// ---------------------------------------------------------------- CSV

namespace {

enum class Kind { integer, real, optional_real, int_list };

struct Column {
  const char* name;
  Kind kind;
  int ContestRecord::*i = nullptr;
  double ContestRecord::*d = nullptr;
};

const std::vector<Column>& columns() {
  using R = ContestRecord;
  static const std::vector<Column> cols = {
      {"tournament_id", Kind::integer, &R::tournament_id},
      {"event_id", Kind::integer, &R::event_id},
      {"year", Kind::integer, &R::year},
      {"stage", Kind::integer, &R::stage},
      {"contest_id", Kind::integer, &R::contest_id},
      {"schedule_position", Kind::integer, &R::schedule_position},
      {"bracket_position", Kind::integer, &R::bracket_position},
      {"bracket_size", Kind::integer, &R::bracket_size},
      {"best_of", Kind::integer, &R::best_of},
      {"favorite_id", Kind::integer, &R::favorite_id},
      {"underdog_id", Kind::integer, &R::underdog_id},
      {"favorite_ability", Kind::real, nullptr, &R::favorite_ability},
      {"underdog_ability", Kind::real, nullptr, &R::underdog_ability},
      {"ability_ratio", Kind::real, nullptr, &R::ability_ratio},
      {"ability_difference", Kind::real, nullptr, &R::ability_difference},
      {"log_ability_difference", Kind::real, nullptr, &R::log_ability_difference},
      {"performance_favorite", Kind::real, nullptr, &R::performance_favorite},
      {"performance_underdog", Kind::real, nullptr, &R::performance_underdog},
      {"performance_mean", Kind::real, nullptr, &R::performance_mean},
      {"performance_favorite_first_half", Kind::real, nullptr, &R::performance_favorite_first_half},
      {"performance_favorite_second_half", Kind::real, nullptr,
       &R::performance_favorite_second_half},
      {"performance_underdog_first_half", Kind::real, nullptr, &R::performance_underdog_first_half},
      {"performance_underdog_second_half", Kind::real, nullptr,
       &R::performance_underdog_second_half},
      {"performance_mean_first_half", Kind::real, nullptr, &R::performance_mean_first_half},
      {"performance_mean_second_half", Kind::real, nullptr, &R::performance_mean_second_half},
      {"first6_favorite", Kind::real, nullptr, &R::first6_favorite},
      {"first6_underdog", Kind::real, nullptr, &R::first6_underdog},
      {"favorite_wins", Kind::integer, &R::favorite_wins},
      {"contest_length_fraction", Kind::real, nullptr, &R::contest_length_fraction},
      {"legs_played", Kind::integer, &R::legs_played},
      {"n_180s", Kind::integer, &R::n_180s},
      {"n_100plus", Kind::integer, &R::n_100plus},
      {"n_140plus", Kind::integer, &R::n_140plus},
      {"favorite_starts", Kind::integer, &R::favorite_starts},
      {"underdog_starts", Kind::integer, &R::underdog_starts},
      {"expected_ability_next", Kind::optional_real, nullptr, &R::expected_ability_next},
      {"opponent_known", Kind::optional_real, nullptr, &R::opponent_known},
      {"twin_favorite_ability", Kind::optional_real, nullptr, &R::twin_favorite_ability},
      {"favorite_world_ranking", Kind::real, nullptr, &R::favorite_world_ranking},
      {"underdog_world_ranking", Kind::real, nullptr, &R::underdog_world_ranking},
      {"favorite_experience", Kind::real, nullptr, &R::favorite_experience},
      {"underdog_experience", Kind::real, nullptr, &R::underdog_experience},
      {"favorite_home", Kind::integer, &R::favorite_home},
      {"underdog_home", Kind::integer, &R::underdog_home},
      {"prize_money", Kind::real, nullptr, &R::prize_money},
      {"winner_darts", Kind::int_list},
  };
  return cols;
}

void write_real(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

double parse_real(const std::string& cell, long row, long col, const char* name) {
  if (cell.empty())
    throw ParseError("row " + std::to_string(row) + ", column '" + name + "': empty value", row,
                     col);
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || !std::isfinite(v))
    throw ParseError("row " + std::to_string(row) + ", column '" + name + "': not a number '" +
                         cell + "'",
                     row, col);
  return v;
}

int parse_int(const std::string& cell, long row, long col, const char* name) {
  int v = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw ParseError("row " + std::to_string(row) + ", column '" + name + "': not an integer '" +
                         cell + "'",
                     row, col);
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

const std::vector<std::string>& panel_columns() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& c : columns()) v.emplace_back(c.name);
    return v;
  }();
  return names;
}

std::vector<std::pair<std::string, std::vector<double>>> numeric_columns(
    const std::vector<ContestRecord>& records) {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  for (const auto& c : columns()) {
    if (c.kind == Kind::int_list) continue;
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(c.kind == Kind::integer ? r.*(c.i) : r.*(c.d));
    out.emplace_back(c.name, std::move(v));
  }
  return out;
}

void export_panel(const std::vector<ContestRecord>& records, std::ostream& out) {
  const auto& cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].name;
  out << '\n';
  for (const auto& r : records) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ',';
      const auto& c = cols[i];
      switch (c.kind) {
        case Kind::integer:
          out << r.*(c.i);
          break;
        case Kind::real:
          write_real(out, r.*(c.d));
          break;
        case Kind::optional_real:
          if (!std::isnan(r.*(c.d))) write_real(out, r.*(c.d));
          break;
        case Kind::int_list:
          for (std::size_t k = 0; k < r.winner_darts.size(); ++k)
            out << (k ? " " : "") << r.winner_darts[k];
          break;
      }
    }
    out << '\n';
  }
}

void export_panel(const std::vector<ContestRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write panel to " + path);
  export_panel(records, out);
  if (!out) throw ArgumentError("write failed for " + path);
}

std::vector<ContestRecord> import_panel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty panel file: missing header", 1, -1);
  const auto header = split_csv(line);
  std::map<std::string, long> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = static_cast<long>(i);
  const auto& cols = columns();
  std::vector<long> where(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    auto it = index.find(cols[i].name);
    if (it == index.end())
      throw ParseError(std::string("missing required column '") + cols[i].name + "'", 1, -1);
    where[i] = it->second;
  }
  std::vector<ContestRecord> records;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw ParseError("row " + std::to_string(row) + ": expected " +
                           std::to_string(header.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       row, static_cast<long>(std::min(cells.size(), header.size())) + 1);
    ContestRecord r;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto& c = cols[i];
      const long col = where[i];
      const std::string& cell = cells[static_cast<std::size_t>(col)];
      switch (c.kind) {
        case Kind::integer:
          r.*(c.i) = parse_int(cell, row, col + 1, c.name);
          break;
        case Kind::real:
          r.*(c.d) = parse_real(cell, row, col + 1, c.name);
          break;
        case Kind::optional_real:
          r.*(c.d) = cell.empty() ? kNaN : parse_real(cell, row, col + 1, c.name);
          break;
        case Kind::int_list: {
          std::istringstream ss(cell);
          std::string tok;
          while (ss >> tok) r.winner_darts.push_back(parse_int(tok, row, col + 1, c.name));
          break;
        }
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ContestRecord> import_panel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open panel " + path);
  return import_panel(in);
}

}  // namespace contestlab::dgp
