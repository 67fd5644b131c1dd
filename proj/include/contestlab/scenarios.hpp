#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contestlab/estimators.hpp"
#include "contestlab/panel.hpp"
#include "contestlab/report.hpp"
#include "contestlab/tournament_dgp.hpp"

namespace contestlab::scenario {

enum class Id { table2, table3, table4, table5, table6, fig2, fig3, fig4, fig5, calibration, placebo };

const char* to_string(Id id);
Id id_from_string(const std::string& name);
const std::vector<Id>& all_ids();

enum class Side { favorite, underdog };
const char* to_string(Side side);

struct EstimatorOptions {
  // "own" clusters on the focal player's id; "favorite" or "underdog" force one.
  std::string cluster = "own";
  // Doubly robust curves.
  int n_trees = 500;
  int min_leaf = 5;
  double density_floor = 0.01;
  int curve_points = 101;
  std::string kernel = "epanechnikov";
  // Monte Carlo scenarios.
  int replications = 100;
  // Subsample splits; "experience" and "ability" use the focal player's column.
  std::vector<std::string> split_variables = {"experience", "ability", "prize_money"};
  // Model curves.
  double theta_max = 3.0;
  int theta_points = 201;
  double alpha = 0.2;
  double reward_multiplier = 2.0;

  void validate() const;
};

struct ScenarioConfig {
  Id id = Id::table2;
  dgp::DgpConfig dgp = dgp::DgpConfig::calibrated();
  EstimatorOptions options;
  std::uint64_t seed = 42;
  // Empty means out/<scenario id>.
  std::string out_dir;
};

// Built-in defaults; identical to the files under configs/.
ScenarioConfig default_config(Id id);

// {"scenario": ..., "seed": ..., "dgp": <object or path>, "estimator": {...}, "out": ...}.
// A dgp path is resolved relative to base_dir. Unknown keys are rejected.
ScenarioConfig config_from_json(const std::string& text, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);
std::string config_to_json(const ScenarioConfig& config);

struct Artifact {
  std::string name;
  std::string content;
};

struct ScenarioResult {
  Id id = Id::table2;
  std::vector<Artifact> artifacts;
  std::string text;
  report::json data;
  // Scenario-level verdict where one exists (calibration targets, placebo
  // rejection band); true otherwise.
  bool ok = true;
};

// Runs one scenario. Estimation scenarios use `panel` when given and
// simulate one from the config otherwise; calibration, placebo and fig5
// ignore it.
ScenarioResult run(const ScenarioConfig& config, const Panel* panel = nullptr);
void write_artifacts(const ScenarioResult& result, const std::string& dir);

// ---------------------------------------------------------------- shared specs

// Controls of the full baseline regression (column 3).
const std::vector<std::string>& baseline_controls();

// Focal performance on the ability ratio with stage, tournament-by-year and
// individual FE. column 1: no controls, 2: world rankings, 3: all controls.
est::RegressionSpec performance_spec(Side side, const std::string& outcome,
                                     const EstimatorOptions& options, int column = 3);

// Favorite performance on the instrumented expected next-opponent ability
// with stage and tournament-by-year FE (2SLS panel), or with individual FE
// added (OLS panel).
est::RegressionSpec spillover_spec(const std::string& outcome, const EstimatorOptions& options,
                                   bool individual_fe);

// Focal player's ability, ranking, experience and home flag plus prize money
// and stage.
est::DrSpec dr_spec(Side side, const std::string& outcome);
est::DrOptions dr_options(const EstimatorOptions& options, std::uint64_t seed);

// Least-squares slope of the curve between the 10th and 90th percentiles of
// the treatment, times `step`.
double step_effect(const est::DrResult& result, double step = 0.05);

struct Moment {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Table 1 targets with their acceptance tolerances.
std::vector<Moment> calibration_moments(const std::vector<dgp::ContestRecord>& records);

struct PlaceboRates {
  int replications = 0;
  double ratio_underdog = 0.0;
  double ratio_favorite = 0.0;
  double headstart = 0.0;
  double spillover = 0.0;
};

// Share of replications rejecting a zero effect at 5%; replication r uses
// seed stream_seed(seed, r).
PlaceboRates placebo_rates(const dgp::DgpConfig& config, const EstimatorOptions& options,
                           std::uint64_t seed, int replications);

}  // namespace contestlab::scenario
