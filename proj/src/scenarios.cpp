#include "contestlab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "contestlab/contest_models.hpp"
#include "contestlab/parallel.hpp"
#include "contestlab/rng.hpp"
#include "contestlab/svg.hpp"
#include "json_util.hpp"

namespace contestlab::scenario {

using report::json;

namespace {

constexpr const char* kIdNames[] = {"table2", "table3", "table4", "table5",      "table6", "fig2",
                                    "fig3",   "fig4",   "fig5",   "calibration", "placebo"};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

const char* to_string(Id id) { return kIdNames[static_cast<int>(id)]; }

Id id_from_string(const std::string& name) {
  for (int i = 0; i < 11; ++i)
    if (name == kIdNames[i]) return static_cast<Id>(i);
  throw ArgumentError("unknown scenario '" + name + "'");
}

const std::vector<Id>& all_ids() {
  static const std::vector<Id> ids = {Id::table2, Id::table3, Id::table4,      Id::table5,
                                      Id::table6, Id::fig2,   Id::fig3,        Id::fig4,
                                      Id::fig5,   Id::calibration, Id::placebo};
  return ids;
}

const char* to_string(Side side) { return side == Side::favorite ? "favorite" : "underdog"; }

void EstimatorOptions::validate() const {
  if (cluster != "own" && cluster != "favorite" && cluster != "underdog")
    throw ArgumentError("estimator.cluster must be own, favorite or underdog");
  if (n_trees < 1 || min_leaf < 1) throw ArgumentError("estimator.n_trees and min_leaf must be >= 1");
  if (!(density_floor > 0)) throw ArgumentError("estimator.density_floor must be positive");
  if (curve_points < 2) throw ArgumentError("estimator.curve_points must be >= 2");
  ml::kernel_from_string(kernel);
  if (replications < 1) throw ArgumentError("estimator.replications must be >= 1");
  if (!(theta_max > 1)) throw ArgumentError("estimator.theta_max must exceed 1");
  if (theta_points < 2) throw ArgumentError("estimator.theta_points must be >= 2");
  if (!(alpha >= 0)) throw ArgumentError("estimator.alpha must be non-negative");
  if (!(reward_multiplier > 0)) throw ArgumentError("estimator.reward_multiplier must be positive");
}

// ---------------------------------------------------------------- configs

ScenarioConfig default_config(Id id) {
  ScenarioConfig c;
  c.id = id;
  auto& e = c.dgp.effects;
  switch (id) {
    case Id::table3:
      e.beta_underdog_ratio_first_half = -13.349;
      e.beta_underdog_ratio_second_half = -17.198;
      e.beta_favorite_ratio_first_half = 12.303;
      e.beta_favorite_ratio_second_half = -2.035;
      break;
    case Id::table5:
      e.gamma_headstart_heterogeneity = 0.20;
      break;
    case Id::placebo:
      e = dgp::TrueEffects::zero();
      break;
    default:
      break;
  }
  return c;
}

ScenarioConfig config_from_json(const std::string& text, const std::string& base_dir) {
  const json doc = detail::parse_json(text);
  detail::ObjectReader top(doc, "config");
  std::string id;
  top.get("scenario", id);
  if (id.empty()) throw ArgumentError("config: 'scenario' is required");
  ScenarioConfig c = default_config(id_from_string(id));
  if (!top.has("seed")) throw ArgumentError("config: 'seed' is required");
  top.get("seed", c.seed);
  top.get("out", c.out_dir);
  if (top.has("dgp")) {
    const json& d = top.child("dgp");
    if (d.is_string()) {
      const auto path = std::filesystem::path(base_dir) / d.get<std::string>();
      std::ifstream in(path);
      if (!in) throw ArgumentError("config: cannot open dgp file '" + path.string() + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      c.dgp = dgp::dgp_config_from_json(ss.str());
    } else {
      c.dgp = dgp::dgp_config_from_json(d.dump());
    }
  }
  if (top.has("estimator")) {
    auto& o = c.options;
    detail::ObjectReader r(top.child("estimator"), "config.estimator");
    r.get("cluster", o.cluster);
    r.get("n_trees", o.n_trees);
    r.get("min_leaf", o.min_leaf);
    r.get("density_floor", o.density_floor);
    r.get("curve_points", o.curve_points);
    r.get("kernel", o.kernel);
    r.get("replications", o.replications);
    r.get("split_variables", o.split_variables);
    r.get("theta_max", o.theta_max);
    r.get("theta_points", o.theta_points);
    r.get("alpha", o.alpha);
    r.get("reward_multiplier", o.reward_multiplier);
    r.finish();
  }
  top.finish();
  c.dgp.validate();
  c.options.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string config_to_json(const ScenarioConfig& c) {
  const auto& o = c.options;
  json j = {{"scenario", to_string(c.id)},
            {"seed", c.seed},
            {"dgp", json::parse(dgp::dgp_config_to_json(c.dgp))},
            {"estimator",
             {{"cluster", o.cluster},
              {"n_trees", o.n_trees},
              {"min_leaf", o.min_leaf},
              {"density_floor", o.density_floor},
              {"curve_points", o.curve_points},
              {"kernel", o.kernel},
              {"replications", o.replications},
              {"split_variables", o.split_variables},
              {"theta_max", o.theta_max},
              {"theta_points", o.theta_points},
              {"alpha", o.alpha},
              {"reward_multiplier", o.reward_multiplier}}}};
  if (!c.out_dir.empty()) j["out"] = c.out_dir;
  return report::dump(j);
}

// ---------------------------------------------------------------- specs

const std::vector<std::string>& baseline_controls() {
  static const std::vector<std::string> c = {
      "favorite_world_ranking", "underdog_world_ranking", "favorite_experience",
      "underdog_experience",    "underdog_starts",        "favorite_home",
      "underdog_home"};
  return c;
}

namespace {

std::string cluster_column(Side side, const EstimatorOptions& o) {
  if (o.cluster == "favorite") return "favorite_id";
  if (o.cluster == "underdog") return "underdog_id";
  return side == Side::favorite ? "favorite_id" : "underdog_id";
}

std::vector<std::string> controls(int column) {
  const auto& all = baseline_controls();
  if (column <= 1) return {};
  if (column == 2) return {all[0], all[1]};
  return all;
}

// Contest-level outcomes (win, length, mean performance) absorb both players'
// individual effects.
est::RegressionSpec contest_spec(const std::string& outcome, const EstimatorOptions& o,
                                 int column) {
  est::RegressionSpec s;
  s.label = outcome;
  s.outcome = outcome;
  s.regressors = {"ability_ratio"};
  for (const auto& c : controls(column)) s.regressors.push_back(c);
  s.fixed_effects = {"stage", "tournament_year", "favorite_id", "underdog_id"};
  s.cluster = cluster_column(Side::favorite, o);
  return s;
}

est::RegressionSpec outcome_spec(const std::string& outcome, const EstimatorOptions& o,
                                 int column) {
  if (outcome.rfind("performance_underdog", 0) == 0)
    return performance_spec(Side::underdog, outcome, o, column);
  if (outcome.rfind("performance_favorite", 0) == 0)
    return performance_spec(Side::favorite, outcome, o, column);
  return contest_spec(outcome, o, column);
}

Side side_of(const std::string& outcome) {
  return outcome.rfind("performance_underdog", 0) == 0 ? Side::underdog : Side::favorite;
}

}  // namespace

est::RegressionSpec performance_spec(Side side, const std::string& outcome,
                                     const EstimatorOptions& o, int column) {
  est::RegressionSpec s;
  s.label = outcome;
  s.outcome = outcome;
  s.regressors = {"ability_ratio"};
  for (const auto& c : controls(column)) s.regressors.push_back(c);
  s.fixed_effects = {"stage", "tournament_year",
                     side == Side::favorite ? "favorite_id" : "underdog_id"};
  s.cluster = cluster_column(side, o);
  return s;
}

est::RegressionSpec spillover_spec(const std::string& outcome, const EstimatorOptions& o,
                                   bool individual_fe) {
  est::RegressionSpec s = outcome_spec(outcome, o, 3);
  if (!individual_fe) s.fixed_effects = {"stage", "tournament_year"};
  s.cluster = cluster_column(side_of(outcome), o);
  return s;
}

est::DrSpec dr_spec(Side side, const std::string& outcome) {
  const std::string p = to_string(side);
  return {outcome,
          "ability_ratio",
          {p + "_ability", p + "_world_ranking", p + "_experience", p + "_home", "prize_money",
           "stage"},
          {}};
}

est::DrOptions dr_options(const EstimatorOptions& o, std::uint64_t seed) {
  est::DrOptions d;
  d.outcome_forest.n_trees = o.n_trees;
  d.outcome_forest.min_leaf = o.min_leaf;
  d.density_floor = o.density_floor;
  d.curve.points = o.curve_points;
  d.curve.kernel = ml::kernel_from_string(o.kernel);
  d.curve.seed = stream_seed(seed, 7);
  d.seed = seed;
  return d;
}

double step_effect(const est::DrResult& r, double step) {
  std::vector<double> a(r.treatment.data(), r.treatment.data() + r.treatment.size());
  return step * est::curve_slope(r.curve, quantile(a, 0.10), quantile(a, 0.90));
}

std::vector<Moment> calibration_moments(const std::vector<dgp::ContestRecord>& records) {
  if (records.empty()) throw ArgumentError("calibration: empty panel");
  double pf = 0, pu = 0, win = 0, ratio = 0, ratio2 = 0;
  std::vector<double> darts;
  for (const auto& r : records) {
    pf += r.performance_favorite;
    pu += r.performance_underdog;
    win += r.favorite_wins;
    ratio += r.ability_ratio;
    ratio2 += r.ability_ratio * r.ability_ratio;
    for (int d : r.winner_darts) darts.push_back(d);
  }
  const double n = static_cast<double>(records.size());
  const double ratio_mean = ratio / n;
  const double ratio_sd = std::sqrt((ratio2 - n * ratio_mean * ratio_mean) / (n - 1));
  const double median = darts.empty() ? NAN : quantile(darts, 0.5);
  auto m = [](std::string name, double v, double target, double tol) {
    return Moment{std::move(name), v, target, tol, std::abs(v - target) <= tol};
  };
  return {m("performance_favorite_mean", pf / n, 102.254, 1.0),
          m("performance_underdog_mean", pu / n, 97.595, 1.0),
          m("favorite_win_rate", win / n, 0.665, 0.03),
          m("ability_ratio_mean", ratio_mean, 1.055, 0.01),
          m("ability_ratio_sd", ratio_sd, 0.049, 0.01),
          m("median_darts_per_leg", median, 15.0, 2.0)};
}

PlaceboRates placebo_rates(const dgp::DgpConfig& config, const EstimatorOptions& o,
                           std::uint64_t seed, int replications) {
  std::vector<std::array<int, 4>> hits(static_cast<std::size_t>(replications));
  parallel_for(hits.size(), [&](std::size_t r) {
    const Panel p = Panel::from_records(dgp::run_tournaments(config, stream_seed(seed, r)));
    const auto u = est::fe_ols(p, performance_spec(Side::underdog, "performance_underdog", o));
    const auto f = est::fe_ols(p, performance_spec(Side::favorite, "performance_favorite", o));
    const auto iv = est::tsls(p, spillover_spec("performance_favorite", o, false),
                              "expected_ability_next", "opponent_known");
    hits[r] = {u.p_value("ability_ratio") < 0.05, f.p_value("ability_ratio") < 0.05,
               u.p_value("underdog_starts") < 0.05, iv.p_value("expected_ability_next") < 0.05};
  });
  PlaceboRates out;
  out.replications = replications;
  double* rates[] = {&out.ratio_underdog, &out.ratio_favorite, &out.headstart, &out.spillover};
  for (const auto& h : hits)
    for (int k = 0; k < 4; ++k) *rates[k] += h[static_cast<std::size_t>(k)];
  for (double* r : rates) *r /= replications;
  return out;
}

// ---------------------------------------------------------------- scenarios

namespace {

struct Context {
  const ScenarioConfig& config;
  const Panel& panel;
  ScenarioResult& result;
};

void add(ScenarioResult& r, std::string name, std::string content) {
  r.artifacts.push_back({std::move(name), std::move(content)});
}

// Text table and JSON for groups of regressions sharing one layout.
struct Block {
  std::string title;
  std::vector<report::Column> columns;
  std::vector<std::string> rows;
};

void emit_tables(ScenarioResult& r, const std::vector<Block>& blocks, json extra = json::object()) {
  json j = std::move(extra);
  j["scenario"] = to_string(r.id);
  j["panels"] = json::array();
  for (const auto& b : blocks) {
    json cols = json::array();
    for (const auto& c : b.columns) {
      json cj = report::to_json(c.result);
      cj["column"] = c.header;
      cols.push_back(std::move(cj));
    }
    j["panels"].push_back({{"title", b.title}, {"columns", cols}});
    r.text += report::text_table(b.title, b.columns, b.rows) + "\n";
  }
  r.data = j;
  add(r, std::string(to_string(r.id)) + ".json", report::dump(j));
  add(r, std::string(to_string(r.id)) + ".txt", r.text);
}

json truth_json(const dgp::TrueEffects& e) {
  auto n = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  return {{"beta_underdog_ratio", e.beta_underdog_ratio},
          {"beta_favorite_ratio", e.beta_favorite_ratio},
          {"beta_underdog_ratio_first_half", n(e.beta_underdog_ratio_first_half)},
          {"beta_underdog_ratio_second_half", n(e.beta_underdog_ratio_second_half)},
          {"beta_favorite_ratio_first_half", n(e.beta_favorite_ratio_first_half)},
          {"beta_favorite_ratio_second_half", n(e.beta_favorite_ratio_second_half)},
          {"gamma_headstart_underdog", e.gamma_headstart_underdog},
          {"gamma_headstart_heterogeneity", e.gamma_headstart_heterogeneity},
          {"delta_spillover_favorite", e.delta_spillover_favorite},
          {"spillover_confounding", e.spillover_confounding}};
}

void table2(Context& c) {
  const auto& o = c.config.options;
  std::vector<std::string> rows{"ability_ratio"};
  for (const auto& x : baseline_controls()) rows.push_back(x);
  std::vector<Block> blocks;
  for (Side side : {Side::underdog, Side::favorite}) {
    const std::string outcome = std::string("performance_") + to_string(side);
    Block b{std::string("Panel ") + (side == Side::underdog ? "A" : "B") + ": " +
                to_string(side) + " performance",
            {},
            rows};
    for (int col = 1; col <= 3; ++col)
      b.columns.push_back({"(" + std::to_string(col) + ")",
                           est::fe_ols(c.panel, performance_spec(side, outcome, o, col))});
    blocks.push_back(std::move(b));
  }
  emit_tables(c.result, blocks, {{"truth", truth_json(c.config.dgp.effects)}});
}

void table3(Context& c) {
  const auto& o = c.config.options;
  std::vector<Block> blocks;
  const char* panels[][2] = {{"A", "underdog"}, {"B", "favorite"}, {"C", "mean"}};
  for (const auto& p : panels) {
    Block b{std::string("Panel ") + p[0] + ": " + p[1] + " performance", {}, {"ability_ratio"}};
    const std::string base = std::string("performance_") + p[1];
    const std::pair<const char*, std::string> cols[] = {
        {"whole contest", base}, {"first half", base + "_first_half"},
        {"second half", base + "_second_half"}};
    for (const auto& [header, outcome] : cols)
      b.columns.push_back({header, est::fe_ols(c.panel, outcome_spec(outcome, o, 3))});
    blocks.push_back(std::move(b));
  }
  emit_tables(c.result, blocks, {{"truth", truth_json(c.config.dgp.effects)}});
}

void table4(Context& c) {
  const auto& o = c.config.options;
  std::vector<Block> blocks;
  const char* panels[][2] = {{"A", "favorite_wins"}, {"B", "contest_length_fraction"}, {"C", "n_180s"}};
  for (const auto& p : panels) {
    Block b{std::string("Panel ") + p[0] + ": " + p[1], {}, {"ability_ratio"}};
    b.columns.push_back({"(1)", est::fe_ols(c.panel, contest_spec(p[1], o, 1))});
    b.columns.push_back({"(2)", est::fe_ols(c.panel, contest_spec(p[1], o, 3))});
    blocks.push_back(std::move(b));
  }
  emit_tables(c.result, blocks);
}

const char* kFourOutcomes[] = {"favorite_wins", "performance_favorite", "performance_underdog",
                               "performance_mean"};

void table5(Context& c) {
  const auto& o = c.config.options;
  Block a{"Panel A: underdog head start", {}, {"underdog_starts"}};
  Block b{"Panel B: head start by ability-ratio tercile",
          {},
          {"ability_ratio", "underdog_starts_x_low", "underdog_starts_x_medium",
           "underdog_starts_x_high"}};
  for (const char* outcome : kFourOutcomes) {
    auto s = outcome_spec(outcome, o, 3);
    a.columns.push_back({outcome, est::fe_ols(c.panel, s)});
    auto& r = s.regressors;
    r.erase(std::remove(r.begin(), r.end(), "underdog_starts"), r.end());
    s.interactions = {{"underdog_starts", "ability_ratio"}};
    b.columns.push_back({outcome, est::fe_ols(c.panel, s)});
  }
  emit_tables(c.result, {a, b}, {{"truth", truth_json(c.config.dgp.effects)}});
}

void table6(Context& c) {
  const auto& o = c.config.options;
  Block a{"Panel A: linear regression", {}, {"expected_ability_next"}};
  Block b{"Panel B: instrumental variable (opponent known)", {}, {"expected_ability_next"}};
  for (const char* outcome : kFourOutcomes) {
    auto s = spillover_spec(outcome, o, true);
    s.regressors.insert(s.regressors.begin(), "expected_ability_next");
    a.columns.push_back({outcome, est::fe_ols(c.panel, s)});
    b.columns.push_back({outcome, est::tsls(c.panel, spillover_spec(outcome, o, false),
                                            "expected_ability_next", "opponent_known")});
  }
  emit_tables(c.result, {a, b}, {{"truth", truth_json(c.config.dgp.effects)}});
}

svg::Series curve_series(const est::DoseResponseCurve& curve, std::string label, std::string color) {
  svg::Series s;
  s.label = std::move(label);
  s.x = curve.grid;
  s.y = curve.estimate;
  s.lower = curve.lower;
  s.upper = curve.upper;
  s.color = std::move(color);
  return s;
}

void fig2(Context& c) {
  const auto& cfg = c.config;
  json j = {{"scenario", "fig2"}, {"curves", json::object()}};
  std::string text = "Dose-response of performance on the ability ratio (doubly robust)\n";
  for (Side side : {Side::underdog, Side::favorite}) {
    const std::string name = to_string(side);
    const std::string outcome = "performance_" + name;
    const auto r = est::dr_dose_response(c.panel, dr_spec(side, outcome),
                                         dr_options(cfg.options, stream_seed(cfg.seed, side == Side::underdog ? 1 : 2)));
    const double step = step_effect(r);
    const double beta = side == Side::underdog ? cfg.dgp.effects.beta_underdog_ratio
                                               : cfg.dgp.effects.beta_favorite_ratio;
    add(c.result, "fig2_" + name + ".csv", report::curve_csv(r.curve));
    svg::LineChart chart;
    chart.title = "Potential " + name + " performance by ability ratio";
    chart.x_label = "ability ratio";
    chart.y_label = "E[Y(a)], 3-darts average";
    chart.series.push_back(curve_series(r.curve, "DR estimate, 90% band", "#1f4e9c"));
    add(c.result, "fig2_" + name + ".svg", svg::render(chart));
    json cj = report::to_json(r.curve);
    cj["step_effect_0.05"] = step;
    cj["planted_step_effect_0.05"] = 0.05 * beta;
    cj["n_obs"] = r.n_obs;
    cj["n_trimmed"] = r.n_trimmed;
    cj["density_bandwidth"] = r.density_bandwidth;
    j["curves"][name] = cj;
    text += "  " + name + ": 0.05-step effect " + report::fixed(step) + " (planted " +
            report::fixed(0.05 * beta) + "), bandwidth " + report::fixed(r.curve.bandwidth.h, 4) +
            ", trimmed " + std::to_string(r.n_trimmed) + "/" + std::to_string(r.n_obs) + "\n";
  }
  c.result.text = text;
  c.result.data = j;
  add(c.result, "fig2.json", report::dump(j));
  add(c.result, "fig2.txt", text);
}

void fig3(Context& c) {
  const auto& cfg = c.config;
  const auto r = est::dr_dose_response(c.panel, dr_spec(Side::favorite, "favorite_wins"),
                                       dr_options(cfg.options, stream_seed(cfg.seed, 3)));
  // Unadjusted kernel regression of the win indicator: the stand-in for the
  // bookmaker-implied probability line.
  est::CurveOptions raw_opt;
  raw_opt.points = cfg.options.curve_points;
  raw_opt.kernel = ml::kernel_from_string(cfg.options.kernel);
  raw_opt.bandwidth = r.curve.bandwidth.h;
  const auto& wins = c.panel.col("favorite_wins");
  const auto& ratio = c.panel.col("ability_ratio");
  Eigen::VectorXd y(static_cast<long>(wins.size())), a(static_cast<long>(wins.size()));
  long n = 0;
  for (std::size_t i = 0; i < wins.size(); ++i)
    if (std::isfinite(wins[i]) && std::isfinite(ratio[i])) {
      y[n] = wins[i];
      a[n] = ratio[i];
      ++n;
    }
  const auto raw = est::dose_response(y.head(n), a.head(n), raw_opt);

  std::string csv = "a,estimate,lower,upper,unadjusted\n";
  for (std::size_t g = 0; g < r.curve.grid.size(); ++g) {
    auto cell = [](double v) { return std::isnan(v) ? std::string() : fmt("%.10g", v); };
    csv += cell(r.curve.grid[g]) + "," + cell(r.curve.estimate[g]) + "," + cell(r.curve.lower[g]) +
           "," + cell(r.curve.upper[g]) + "," + cell(raw.estimate[g]) + "\n";
  }
  add(c.result, "fig3.csv", csv);

  svg::LineChart chart;
  chart.title = "Favorite win probability by ability ratio";
  chart.x_label = "ability ratio";
  chart.y_label = "P(favorite wins)";
  chart.series.push_back(curve_series(r.curve, "DR estimate, 90% band", "#1f4e9c"));
  svg::Series s;
  s.label = "unadjusted win rate";
  s.x = raw.grid;
  s.y = raw.estimate;
  s.color = "#888888";
  s.dashed = true;
  chart.series.push_back(s);
  add(c.result, "fig3.svg", svg::render(chart));

  double top = NAN;
  for (std::size_t g = r.curve.grid.size(); g-- > 0;)
    if (r.curve.supported(g)) {
      top = r.curve.estimate[g];
      break;
    }
  json j = {{"scenario", "fig3"},
            {"curve", report::to_json(r.curve)},
            {"unadjusted", report::to_json(raw)},
            {"win_probability_at_top_of_grid", top},
            {"n_obs", r.n_obs},
            {"n_trimmed", r.n_trimmed}};
  c.result.text = "Favorite win probability (doubly robust): " + report::fixed(top) +
                  " at ability ratio " + report::fixed(r.curve.grid.back()) + "\n";
  c.result.data = j;
  add(c.result, "fig3.json", report::dump(j));
  add(c.result, "fig3.txt", c.result.text);
}

void fig4(Context& c) {
  const auto& o = c.config.options;
  const auto& e = c.config.dgp.effects;
  json j = {{"scenario", "fig4"}, {"estimates", json::array()}};
  std::string text = "Subsample estimates of the ability-ratio coefficient (90% CI)\n";
  for (Side side : {Side::underdog, Side::favorite}) {
    const std::string name = to_string(side);
    const std::string outcome = "performance_" + name;
    const double truth = side == Side::underdog ? e.beta_underdog_ratio : e.beta_favorite_ratio;
    svg::WhiskerChart chart;
    chart.title = "Ability-ratio effect on " + name + " performance by subsample";
    chart.y_label = "coefficient";
    chart.reference = truth;
    chart.reference_label = "planted " + report::fixed(truth);
    for (const auto& v : o.split_variables) {
      const std::string column = (v == "experience" || v == "ability") ? name + "_" + v : v;
      const auto [low, high] = est::subsample_split(c.panel, column);
      for (const auto& [half, sub] : {std::pair{"low", &low}, std::pair{"high", &high}}) {
        const auto r = est::fe_ols(*sub, performance_spec(side, outcome, o));
        const auto [lo, hi] = r.ci("ability_ratio", 0.90);
        const double b = r.coef("ability_ratio");
        chart.items.push_back({column + " " + half, b, lo, hi});
        j["estimates"].push_back({{"side", name},
                                  {"split", column},
                                  {"half", half},
                                  {"estimate", b},
                                  {"ci90", {lo, hi}},
                                  {"n_obs", r.n_obs},
                                  {"truth", truth}});
        text += "  " + name + " | " + column + " " + half + ": " + report::fixed(b) + " [" +
                report::fixed(lo) + ", " + report::fixed(hi) + "] N=" + std::to_string(r.n_obs) + "\n";
      }
    }
    add(c.result, "fig4_" + name + ".svg", svg::render(chart));
  }
  c.result.text = text;
  c.result.data = j;
  add(c.result, "fig4.json", report::dump(j));
  add(c.result, "fig4.txt", text);
}

void fig5(ScenarioResult& res, const EstimatorOptions& o) {
  using contest::ContestModelSpec;
  struct Item {
    const char* name;
    ContestModelSpec spec;
  };
  const Item items[] = {
      {"baseline", ContestModelSpec::baseline(1.0)},
      {"reward_scaled", ContestModelSpec::reward_scaled(1.0, o.reward_multiplier)},
      {"reward_theta_dependent", ContestModelSpec::reward_theta_dependent(1.0, o.alpha)},
      {"choking", ContestModelSpec::choking(1.0, o.alpha)},
  };
  json j = {{"scenario", "fig5"}, {"variants", json::object()}};
  std::string text = "Equilibrium effort curves on theta in [1, " + report::fixed(o.theta_max, 2) + "]\n";
  for (const auto& it : items) {
    const auto curve = contest::effort_curve(it.spec, o.theta_max,
                                             static_cast<std::size_t>(o.theta_points));
    std::ostringstream csv;
    contest::write_effort_curve_csv(csv, curve);
    add(res, std::string("fig5_") + it.name + ".csv", csv.str());

    std::size_t peak_l = 0, peak_h = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
      if (curve[i].effort_l > curve[peak_l].effort_l) peak_l = i;
      if (curve[i].effort_h > curve[peak_h].effort_h) peak_h = i;
    }
    svg::LineChart chart;
    chart.title = std::string("Equilibrium effort: ") + it.name;
    chart.x_label = "theta_h (relative ability of the favorite)";
    chart.y_label = "effort";
    svg::Series l{"e_l (lower ability)", {}, {}, {}, {}, "#c0392b", false};
    svg::Series h{"e_h (higher ability)", {}, {}, {}, {}, "#1f4e9c", true};
    for (const auto& p : curve) {
      l.x.push_back(p.theta);
      l.y.push_back(p.effort_l);
      h.x.push_back(p.theta);
      h.y.push_back(p.effort_h);
    }
    chart.series = {l, h};
    json vj = {{"peak_theta_e_l", curve[peak_l].theta}, {"peak_theta_e_h", curve[peak_h].theta}};
    if (it.spec.variant == contest::Variant::choking) {
      const double t = contest::choking_peak_theta(o.alpha);
      chart.markers.push_back({t, "e_h peak " + report::fixed(t, 4)});
      vj["analytic_peak_theta_e_h"] = t;
    }
    if (it.spec.variant == contest::Variant::reward_scaled)
      chart.markers.push_back({o.reward_multiplier, "theta = a"});
    add(res, std::string("fig5_") + it.name + ".svg", svg::render(chart));
    j["variants"][it.name] = vj;
    text += std::string("  ") + it.name + ": e_l peaks at " + report::fixed(curve[peak_l].theta) +
            ", e_h peaks at " + report::fixed(curve[peak_h].theta) + "\n";
  }
  res.text = text;
  res.data = j;
  add(res, "fig5.json", report::dump(j));
  add(res, "fig5.txt", text);
}

void calibration(ScenarioResult& res, const ScenarioConfig& cfg) {
  const auto records = dgp::run_tournaments(cfg.dgp, cfg.seed);
  const auto moments = calibration_moments(records);
  json j = {{"scenario", "calibration"}, {"n_contests", records.size()}, {"moments", json::array()}};
  std::string text = "Calibration to the reference moments (" + std::to_string(records.size()) +
                     " contests)\n";
  for (const auto& m : moments) {
    res.ok = res.ok && m.passed;
    j["moments"].push_back({{"name", m.name},
                            {"value", m.value},
                            {"target", m.target},
                            {"tolerance", m.tolerance},
                            {"passed", m.passed}});
    text += "  " + m.name + std::string(28 - std::min<std::size_t>(27, m.name.size()), ' ') +
            report::fixed(m.value, 3) + "  target " + report::fixed(m.target, 3) + " +/- " +
            report::fixed(m.tolerance, 3) + "  " + (m.passed ? "PASS" : "FAIL") + "\n";
  }
  j["passed"] = res.ok;
  res.text = text;
  res.data = j;
  add(res, "calibration.json", report::dump(j));
  add(res, "calibration.txt", text);
}

void placebo(ScenarioResult& res, const ScenarioConfig& cfg) {
  const auto r = placebo_rates(cfg.dgp, cfg.options, cfg.seed, cfg.options.replications);
  const std::pair<const char*, double> rates[] = {{"ability_ratio_underdog", r.ratio_underdog},
                                                  {"ability_ratio_favorite", r.ratio_favorite},
                                                  {"headstart", r.headstart},
                                                  {"spillover_2sls", r.spillover}};
  json j = {{"scenario", "placebo"}, {"replications", r.replications}, {"rejection_rate_5pct", json::object()}};
  std::string text = "Placebo: share of " + std::to_string(r.replications) +
                     " zero-effect panels rejecting at 5%\n";
  for (const auto& [name, v] : rates) {
    const bool in_band = v >= 0.02 && v <= 0.10;
    res.ok = res.ok && in_band;
    j["rejection_rate_5pct"][name] = v;
    text += std::string("  ") + name + ": " + report::fixed(v, 2) + (in_band ? "" : "  (outside [0.02, 0.10])") + "\n";
  }
  j["passed"] = res.ok;
  res.text = text;
  res.data = j;
  add(res, "placebo.json", report::dump(j));
  add(res, "placebo.txt", text);
}

}  // namespace

ScenarioResult run(const ScenarioConfig& config, const Panel* panel) {
  config.options.validate();
  ScenarioResult res;
  res.id = config.id;
  switch (config.id) {
    case Id::fig5:
      fig5(res, config.options);
      return res;
    case Id::calibration:
      calibration(res, config);
      return res;
    case Id::placebo:
      placebo(res, config);
      return res;
    default:
      break;
  }
  Panel simulated;
  if (!panel) {
    simulated = Panel::from_records(dgp::run_tournaments(config.dgp, config.seed));
    panel = &simulated;
  }
  Context c{config, *panel, res};
  switch (config.id) {
    case Id::table2: table2(c); break;
    case Id::table3: table3(c); break;
    case Id::table4: table4(c); break;
    case Id::table5: table5(c); break;
    case Id::table6: table6(c); break;
    case Id::fig2: fig2(c); break;
    case Id::fig3: fig3(c); break;
    case Id::fig4: fig4(c); break;
    default: break;
  }
  return res;
}

void write_artifacts(const ScenarioResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& a : result.artifacts) {
    const auto path = std::filesystem::path(dir) / a.name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << a.content;
  }
}

}  // namespace contestlab::scenario
