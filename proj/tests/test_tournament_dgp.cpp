#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "contestlab/errors.hpp"
#include "contestlab/parallel.hpp"
#include "contestlab/tournament_dgp.hpp"
#include "doctest.h"

using namespace contestlab;
using namespace contestlab::dgp;

namespace {

std::vector<int> iota_ids(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same_record(const ContestRecord& a, const ContestRecord& b) {
  std::ostringstream sa, sb;
  export_panel({a}, sa);
  export_panel({b}, sb);
  return sa.str() == sb.str() && same(a.expected_ability_next, b.expected_ability_next) &&
         a.winner_darts == b.winner_darts;
}

std::string to_csv(const std::vector<ContestRecord>& r) {
  std::ostringstream out;
  export_panel(r, out);
  return out.str();
}

DgpConfig small_config() {
  DgpConfig c = DgpConfig::calibrated();
  c.formats = {{32, 8, 0, {11, 11, 13, 15, 19}, 20}, {16, 4, 2, {11, 15, 17, 21}, 6}};
  return c;
}

}  // namespace

TEST_CASE("seed anchoring keeps top seeds apart") {
  const auto pos = seed_positions(4);
  CHECK(pos[0] / 2 != pos[1] / 2);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    auto b = make_draw({10, 11, 12, 13}, 2, 4, rng);
    const auto s10 = std::find(b.slots.begin(), b.slots.end(), 10) - b.slots.begin();
    const auto s11 = std::find(b.slots.begin(), b.slots.end(), 11) - b.slots.begin();
    CHECK(s10 / 2 != s11 / 2);
  }
  // Seeds 1-4 of 32 land in different quarters.
  const auto p32 = seed_positions(32);
  std::set<int> quarters;
  for (int k = 0; k < 4; ++k) quarters.insert(p32[k] / 8);
  CHECK(quarters.size() == 4);
}

TEST_CASE("unseeded players meet each seed slot uniformly") {
  Rng rng(2);
  const auto players = iota_ids(32);
  const int target = 20;
  std::map<int, int> hits;
  int total = 0;
  for (int i = 0; i < 10000; ++i) {
    auto b = make_draw(players, 8, 32, rng);
    const auto at = std::find(b.slots.begin(), b.slots.end(), target) - b.slots.begin();
    const int opp = b.slots[at ^ 1];
    if (opp < 8) {
      ++hits[opp];
      ++total;
    }
  }
  CHECK(hits.size() == 8);
  for (auto [seed, n] : hits) CHECK(std::abs(n / double(total) - 1.0 / 8) < 0.02);
  CHECK(std::abs(total / 10000.0 - 8.0 / 24) < 0.02);
}

TEST_CASE("no seeds gives uniform pairing") {
  Rng rng(3);
  const auto players = iota_ids(8);
  std::map<int, int> opp;
  for (int i = 0; i < 14000; ++i) {
    auto b = make_draw(players, 0, 8, rng);
    const auto at = std::find(b.slots.begin(), b.slots.end(), 0) - b.slots.begin();
    ++opp[b.slots[at ^ 1]];
  }
  CHECK(opp.size() == 7);
  for (auto [p, n] : opp) CHECK(std::abs(n / 14000.0 - 1.0 / 7) < 0.02);
}

TEST_CASE("byes and draw validation") {
  Rng rng(4);
  auto b = make_draw(iota_ids(14), 4, 16, rng, 2);
  const auto pos = seed_positions(16);
  CHECK(b.slots[pos[0]] == 0);
  CHECK(b.slots[pos[0] ^ 1] == -1);
  CHECK(b.slots[pos[1] ^ 1] == -1);
  CHECK(std::count(b.slots.begin(), b.slots.end(), -1) == 2);
  CHECK_THROWS_AS(make_draw(iota_ids(15), 4, 16, rng), ArgumentError);
  CHECK_THROWS_AS(make_draw(iota_ids(12), 4, 12, rng), ArgumentError);
  CHECK_THROWS_AS(make_draw(iota_ids(16), 9, 16, rng), ArgumentError);
}

TEST_CASE("schedule order is uniform within a stage") {
  Rng rng(5);
  int first_zero = 0;
  for (int i = 0; i < 10000; ++i) {
    auto s = schedule(4, rng);
    REQUIRE(s.order.size() == 2);
    CHECK(s.order[1] == std::vector<int>{0});
    first_zero += s.order[0][0] == 0;
  }
  CHECK(std::abs(first_zero / 10000.0 - 0.5) < 0.02);
}

TEST_CASE("expected_next_ability definition") {
  TwinState upset{false, true, 96.0, 91.0};
  auto a = expected_next_ability(false, upset);
  CHECK(a.applicable);
  CHECK(a.opponent_known);
  CHECK(a.expected_ability == 91.0);

  TwinState pending{false, false, 96.0, kNaN};
  auto b = expected_next_ability(false, pending);
  CHECK_FALSE(b.opponent_known);
  CHECK(b.expected_ability == 96.0);

  TwinState bye{true, true, 93.0, 93.0};
  CHECK(expected_next_ability(false, bye).opponent_known);

  CHECK_FALSE(expected_next_ability(true, upset).applicable);
}

TEST_CASE("effort_response planted shifts") {
  DgpConfig c = DgpConfig::calibrated();
  ResponseContext ctx;
  ctx.skill_favorite = 95;
  ctx.skill_underdog = 90;
  ctx.ability_ratio = 1.1;
  ctx.common_shift = 1.5;
  ctx.form_favorite = 0.25;
  ctx.form_underdog = -0.5;
  const double prem = c.pool.first9_premium;

  auto zero = effort_response(ctx, TrueEffects::zero(), c);
  CHECK(zero.underdog_first == doctest::Approx(90 + prem + 1.5 - 0.5));
  CHECK(zero.favorite_second == doctest::Approx(95 + prem + 1.5 + 0.25));

  TrueEffects e = TrueEffects::zero();
  e.beta_underdog_ratio = -15.075;
  auto r = effort_response(ctx, e, c);
  CHECK(r.underdog_first - zero.underdog_first == doctest::Approx(-1.5075));
  CHECK(r.underdog_second - zero.underdog_second == doctest::Approx(-1.5075));

  e = TrueEffects::zero();
  e.gamma_headstart_underdog = 0.688;
  ctx.underdog_starts = true;
  r = effort_response(ctx, e, c);
  CHECK(r.underdog_first - zero.underdog_first == doctest::Approx(0.688));
  CHECK(r.favorite_first == doctest::Approx(zero.favorite_first));

  e = TrueEffects::zero();
  e.beta_favorite_ratio = 5.0;
  e.beta_favorite_ratio_first_half = 12.303;
  e.beta_favorite_ratio_second_half = -2.035;
  r = effort_response(ctx, e, c);
  CHECK(r.favorite_first - zero.favorite_first == doctest::Approx(1.2303));
  CHECK(r.favorite_second - zero.favorite_second == doctest::Approx(-0.2035));

  e = TrueEffects::zero();
  e.delta_spillover_favorite = -0.563;
  ctx.expected_ability_next = c.expected_ability_ref + 2.0;
  ctx.twin_favorite_ability = c.expected_ability_ref + 3.0;
  r = effort_response(ctx, e, c);
  CHECK(r.favorite_first - zero.favorite_first == doctest::Approx(-1.126));
  CHECK(r.underdog_first == doctest::Approx(zero.underdog_first + 0.0));
}

TEST_CASE("tournament structure and labeling") {
  const auto c = small_config();
  const auto recs = run_tournaments(c, 17);
  CHECK(static_cast<int>(recs.size()) == c.n_contests());
  CHECK(recs.size() == 20u * 31 + 6u * 13);

  std::map<int, int> per_tournament;
  std::map<std::tuple<int, int, int>, const ContestRecord*> by_slot;
  for (const auto& r : recs) {
    ++per_tournament[r.tournament_id];
    by_slot[{r.tournament_id, r.stage, r.bracket_position}] = &r;
    CHECK(r.favorite_ability >= r.underdog_ability);
    CHECK(r.ability_ratio >= 1.0);
    CHECK(r.stage >= 1);
    CHECK(r.favorite_starts + r.underdog_starts == 1);
    CHECK(r.legs_played == static_cast<int>(r.winner_darts.size()));
  }
  for (auto [t, n] : per_tournament) CHECK((n == 31 || n == 13));

  int checked = 0;
  for (const auto& r : recs) {
    const int stages = r.bracket_size == 32 ? 5 : 4;
    if (r.stage == stages) {
      CHECK(std::isnan(r.expected_ability_next));
      CHECK(std::isnan(r.opponent_known));
      continue;
    }
    auto it = by_slot.find({r.tournament_id, r.stage, r.bracket_position ^ 1});
    if (it == by_slot.end()) {
      CHECK(r.opponent_known == 1.0);  // twin was a bye
      continue;
    }
    const bool earlier = it->second->schedule_position < r.schedule_position;
    CHECK(r.opponent_known == (earlier ? 1.0 : 0.0));
    if (!earlier) CHECK(r.expected_ability_next == it->second->favorite_ability);
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("upsets lower the expected next-opponent ability when known") {
  const auto recs = run_tournaments(DgpConfig::calibrated(), 3);
  double s1 = 0, s0 = 0;
  int n1 = 0, n0 = 0;
  for (const auto& r : recs) {
    if (std::isnan(r.opponent_known)) continue;
    (r.opponent_known == 1.0 ? s1 : s0) += r.expected_ability_next;
    (r.opponent_known == 1.0 ? n1 : n0) += 1;
  }
  REQUIRE(n1 > 0);
  REQUIRE(n0 > 0);
  CHECK(s1 / n1 < s0 / n0);
}

TEST_CASE("determinism across runs and thread counts") {
  const auto c = small_config();
  set_threads(1);
  const auto a = to_csv(run_tournaments(c, 99));
  set_threads(4);
  const auto b = to_csv(run_tournaments(c, 99));
  set_threads(0);
  CHECK(a == b);
  CHECK(a != to_csv(run_tournaments(c, 100)));
}

TEST_CASE("panel CSV round trip and diagnostics") {
  const auto recs = run_tournaments(DgpConfig::calibrated(), 5);
  REQUIRE(recs.size() == 4776);
  std::stringstream buf;
  export_panel(recs, buf);
  const std::string text = buf.str();
  std::istringstream in(text);
  const auto back = import_panel(in);
  REQUIRE(back.size() == 4776);
  for (std::size_t i = 0; i < recs.size(); i += 97) CHECK(same_record(recs[i], back[i]));
  CHECK(to_csv(back) == text);

  const auto header_end = text.find('\n');
  const std::string header = text.substr(0, header_end);
  CHECK(header.rfind("tournament_id,event_id,year,stage,contest_id", 0) == 0);

  // Missing column.
  {
    std::string h = header;
    const auto p = h.find("ability_ratio,");
    h.erase(p, std::string("ability_ratio,").size());
    std::istringstream bad(h + "\n");
    try {
      import_panel(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("ability_ratio") != std::string::npos);
    }
  }
  // Malformed cell.
  {
    std::string body = text.substr(0, text.find('\n', header_end + 1) + 1);
    const auto p = body.find(',', header_end + 1);
    body.replace(header_end + 1, p - header_end - 1, "x7");
    std::istringstream bad(body);
    try {
      import_panel(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == 2);
      CHECK(e.column() == 1);
      CHECK(std::string(e.what()).find("tournament_id") != std::string::npos);
    }
  }
  // Wrong field count.
  {
    std::istringstream bad(header + "\n1,2,3\n");
    CHECK_THROWS_AS(import_panel(bad), ParseError);
  }
}

TEST_CASE("config JSON round trip and errors") {
  auto c = DgpConfig::calibrated();
  c.effects.beta_favorite_ratio_first_half = 12.303;
  c.noise.form_sd = 1.25;
  const auto text = dgp_config_to_json(c);
  const auto back = dgp_config_from_json(text);
  CHECK(dgp_config_to_json(back) == text);
  CHECK(back.effects.beta_favorite_ratio_first_half == 12.303);
  CHECK(std::isnan(back.effects.beta_favorite_ratio_second_half));
  CHECK(back.n_contests() == 4776);

  CHECK(dgp_config_from_json("{\"effects\": \"zero\"}").effects.beta_underdog_ratio == 0.0);
  CHECK_THROWS_AS(dgp_config_from_json("{\"pool\": {\"n_player\": 3}}"), ArgumentError);
  CHECK_THROWS_AS(dgp_config_from_json("{\"formats\": [{\"bracket_size\": 12}]}"), ArgumentError);
  try {
    dgp_config_from_json("{\n  \"pool\": {\n    \"n_players\": ,\n  }\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
  }
}
