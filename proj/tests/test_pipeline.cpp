#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "contestlab/parallel.hpp"
#include "contestlab/rng.hpp"
#include "contestlab/scenarios.hpp"
#include "contestlab/svg.hpp"
#include "doctest.h"

using namespace contestlab;
namespace fs = std::filesystem;

namespace {

Panel linear_panel(long n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y, x, g;
  for (long i = 0; i < n; ++i) {
    x.push_back(rng.normal());
    g.push_back(static_cast<double>(i % 20));
    y.push_back(1.5 * x.back() + 0.1 * g.back() + rng.normal());
  }
  std::ostringstream csv;
  csv << "y,x,g\n";
  for (long i = 0; i < n; ++i) csv << y[i] << "," << x[i] << "," << g[i] << "\n";
  std::istringstream in(csv.str());
  return Panel::read_csv(in);
}

est::RegressionSpec linear_spec() {
  est::RegressionSpec s;
  s.label = "y on x";
  s.outcome = "y";
  s.regressors = {"x"};
  s.fixed_effects = {"g"};
  s.cluster = "g";
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(CONTESTLAB_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// ---------------------------------------------------------------- report

TEST_CASE("significance stars and number formatting") {
  CHECK(std::string(report::stars(0.005)) == "***");
  CHECK(std::string(report::stars(0.03)) == "**");
  CHECK(std::string(report::stars(0.07)) == "*");
  CHECK(std::string(report::stars(0.5)).empty());
  CHECK(std::string(report::stars(NAN)).empty());
  CHECK(report::fixed(-0.0001) == "0.000");
  CHECK(report::fixed(1.23456, 2) == "1.23");
  CHECK(report::fixed(NAN) == "NA");
}

TEST_CASE("estimate JSON and text table") {
  const auto r = est::fe_ols(linear_panel(400, 1), linear_spec());
  const auto j = report::to_json(r);
  CHECK(j["coefficients"][0]["name"] == "x");
  CHECK(j["coefficients"][0]["estimate"].get<double>() == doctest::Approx(r.coef("x")));
  CHECK(j["n_obs"] == 400);
  CHECK(j["n_clusters"] == 20);
  const auto ci = j["coefficients"][0]["ci90"];
  CHECK(ci[0].get<double>() < r.coef("x"));
  CHECK(ci[1].get<double>() > r.coef("x"));

  const std::string t = report::text_table("Test", {{"(1)", r}, {"(2)", r}}, {"x", "absent"});
  CHECK(t.find("Test\n") == 0);
  CHECK(t.find(report::fixed(r.coef("x")) + "***") != std::string::npos);
  CHECK(t.find("(" + report::fixed(r.se("x")) + ")") != std::string::npos);
  CHECK(t.find("First-stage F") == std::string::npos);
  CHECK(t.find("400") != std::string::npos);
}

TEST_CASE("curve CSV leaves unsupported points empty") {
  est::DoseResponseCurve c;
  c.grid = {1.0, 2.0};
  c.estimate = {0.5, NAN};
  c.se = {0.1, NAN};
  c.lower = {0.3, NAN};
  c.upper = {0.7, NAN};
  CHECK(report::curve_csv(c) == "a,estimate,se,lower,upper\n1,0.5,0.1,0.3,0.7\n2,,,,\n");
  CHECK(report::to_json(c)["points"][1][1].is_null());
}

// ---------------------------------------------------------------- svg

TEST_CASE("line chart draws bands, breaks at NaN and labels markers") {
  svg::LineChart c;
  c.title = "a < b";
  c.series.push_back({"s", {1, 2, 3, 4}, {1, NAN, 3, 4}, {0, 0, 2, 3}, {2, 2, 4, 5}, "#000", false});
  c.markers.push_back({2.5, "peak"});
  const std::string s = svg::render(c);
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("a &lt; b") != std::string::npos);
  CHECK(s.find("<polygon") != std::string::npos);
  CHECK(s.find(">peak<") != std::string::npos);
  // The NaN point starts a new subpath: two M commands in the series path.
  const auto path = s.substr(s.find("<path d=\""));
  const auto d = path.substr(0, path.find("\" fill"));
  CHECK(std::count(d.begin(), d.end(), 'M') == 2);

  c.series[0].y.pop_back();
  CHECK_THROWS_AS(svg::render(c), ArgumentError);
}

TEST_CASE("whisker chart draws one whisker per item and the reference") {
  svg::WhiskerChart c;
  c.items = {{"low", 1, 0, 2}, {"high", 2, 1, 3}};
  c.reference = 1.5;
  c.reference_label = "truth";
  const std::string s = svg::render(c);
  std::size_t circles = 0;
  for (auto p = s.find("<circle"); p != std::string::npos; p = s.find("<circle", p + 1)) ++circles;
  CHECK(circles == 2);
  CHECK(s.find(">truth<") != std::string::npos);
}

// ---------------------------------------------------------------- panel CSV

TEST_CASE("read_csv parses numbers, blanks and text columns") {
  std::istringstream in("a,b,name\n1,2,x\n3,,y\n\n");
  const Panel p = Panel::read_csv(in);
  CHECK(p.rows() == 2);
  CHECK(p.has("a"));
  CHECK_FALSE(p.has("name"));
  CHECK(std::isnan(p.col("b")[1]));

  std::istringstream ragged("a,b\n1,2\n3\n");
  try {
    Panel::read_csv(ragged);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
  }
}

TEST_CASE("exported panel reads back with the same numeric columns") {
  const auto records = dgp::run_tournaments(dgp::DgpConfig::calibrated(), 5);
  std::stringstream csv;
  dgp::export_panel(records, csv);
  const Panel a = Panel::from_records(records);
  const Panel b = Panel::read_csv(csv);
  REQUIRE(a.rows() == b.rows());
  for (const auto& name : {"ability_ratio", "performance_underdog", "favorite_id", "tournament_year",
                           "underdog_year", "opponent_known"}) {
    INFO(name);
    REQUIRE(b.has(name));
    for (std::size_t i = 0; i < a.rows(); i += 97) {
      const double x = a.col(name)[i], y = b.col(name)[i];
      CHECK((x == y || (std::isnan(x) && std::isnan(y)) || std::abs(x - y) < 1e-9 * std::abs(x)));
    }
  }
}

// ---------------------------------------------------------------- configs

TEST_CASE("config parsing validates ids, seeds and keys") {
  const auto c = scenario::config_from_json(R"({"scenario": "table4", "seed": 7, "estimator": {"n_trees": 50}})");
  CHECK(c.id == scenario::Id::table4);
  CHECK(c.seed == 7);
  CHECK(c.options.n_trees == 50);

  CHECK_THROWS_AS(scenario::config_from_json(R"({"scenario": "table9", "seed": 1})"), ArgumentError);
  CHECK_THROWS_AS(scenario::config_from_json(R"({"scenario": "table2"})"), ArgumentError);
  CHECK_THROWS_AS(scenario::config_from_json(R"({"scenario": "table2", "seed": 1, "sead": 2})"),
                  ArgumentError);
  CHECK_THROWS_AS(scenario::config_from_json(R"({"scenario": "table2", "seed": 1, "estimator": {"kernel": "box"}})"),
                  ArgumentError);
  try {
    scenario::config_from_json("{\n  \"scenario\": \"table2\",\n  \"seed\": 1,\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 4);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("checked-in configs equal the built-in defaults") {
  const fs::path dir = fs::path(CONTESTLAB_SOURCE_DIR) / "configs";
  for (auto id : scenario::all_ids()) {
    INFO(scenario::to_string(id));
    auto loaded = scenario::load_config((dir / (std::string(scenario::to_string(id)) + ".json")).string());
    auto expected = scenario::default_config(id);
    CHECK(loaded.id == id);
    loaded.out_dir.clear();
    CHECK(scenario::config_to_json(loaded) == scenario::config_to_json(expected));
  }
}

TEST_CASE("config round-trips through JSON") {
  auto c = scenario::default_config(scenario::Id::table3);
  c.seed = 99;
  c.options.cluster = "underdog";
  c.options.split_variables = {"prize_money"};
  const auto back = scenario::config_from_json(scenario::config_to_json(c));
  CHECK(scenario::config_to_json(back) == scenario::config_to_json(c));
  CHECK(back.dgp.effects.beta_favorite_ratio_first_half == doctest::Approx(12.303));
}

// ---------------------------------------------------------------- scenarios

TEST_CASE("cluster switch selects the cluster column") {
  scenario::EstimatorOptions o;
  CHECK(scenario::performance_spec(scenario::Side::underdog, "performance_underdog", o).cluster == "underdog_id");
  CHECK(scenario::performance_spec(scenario::Side::favorite, "performance_favorite", o).cluster == "favorite_id");
  o.cluster = "underdog";
  CHECK(scenario::performance_spec(scenario::Side::favorite, "performance_favorite", o).cluster == "underdog_id");
  CHECK(scenario::performance_spec(scenario::Side::favorite, "x", o, 1).regressors.size() == 1);
  CHECK(scenario::performance_spec(scenario::Side::favorite, "x", o, 2).regressors.size() == 3);
  CHECK(scenario::spillover_spec("performance_favorite", o, false).fixed_effects.size() == 2);
}

TEST_CASE("calibration moments of a default panel hit their targets") {
  const auto moments = scenario::calibration_moments(dgp::run_tournaments(dgp::DgpConfig::calibrated(), 11));
  REQUIRE(moments.size() == 6);
  for (const auto& m : moments) {
    INFO(m.name << " = " << m.value);
    CHECK(m.passed);
  }
}

TEST_CASE("model curves scenario marks the choking peak") {
  const auto r = scenario::run(scenario::default_config(scenario::Id::fig5));
  const double peak = r.data["variants"]["choking"]["peak_theta_e_h"];
  CHECK(std::abs(peak - 1.3237) <= 0.01);
  CHECK(r.data["variants"]["reward_scaled"]["peak_theta_e_l"].get<double>() == doctest::Approx(2.0));
  CHECK(r.artifacts.size() == 10);
}

TEST_CASE("table scenarios are deterministic and thread-count independent") {
  auto c = scenario::default_config(scenario::Id::table6);
  c.seed = 17;
  const auto a = scenario::run(c);
  set_threads(3);
  const auto b = scenario::run(c);
  set_threads(0);
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (std::size_t k = 0; k < a.artifacts.size(); ++k) CHECK(a.artifacts[k].content == b.artifacts[k].content);
  const auto& iv = a.data["panels"][1]["columns"][1];
  CHECK(iv["method"] == "2sls");
  CHECK(iv["first_stage"]["f_stat"].get<double>() > 10);
}

TEST_CASE("write_artifacts creates the directory and files") {
  const fs::path dir = fs::temp_directory_path() / "contestlab_artifacts_test";
  fs::remove_all(dir);
  scenario::ScenarioResult r;
  r.artifacts = {{"a.txt", "hello\n"}};
  scenario::write_artifacts(r, (dir / "nested").string());
  CHECK(slurp(dir / "nested" / "a.txt") == "hello\n");
  fs::remove_all(dir);
}

// ---------------------------------------------------------------- CLI

TEST_CASE("command-line exit codes") {
  const fs::path dir = fs::temp_directory_path() / "contestlab_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string out = " --out " + (dir / "out").string();

  std::ofstream(dir / "bad.json") << "{\"scenario\": \"table2\", \"seed\": }";
  CHECK(run_cli("estimate --config " + (dir / "bad.json").string()) == 2);
  std::ofstream(dir / "t2.json") << R"({"scenario": "table2", "seed": 3})";
  std::ofstream(dir / "thin.csv") << "ability_ratio,stage\n1.1,1\n1.2,2\n";
  CHECK(run_cli("estimate --config " + (dir / "t2.json").string() + " --panel " +
                (dir / "thin.csv").string() + out) == 3);
  CHECK(run_cli("model-curves --theta-min 0.5" + out) == 2);
  CHECK(run_cli("model-curves --variant reward_scaled" + out) == 0);
  CHECK(fs::exists(dir / "out" / "reward_scaled.svg"));

  CHECK(run_cli("simulate --seed 4" + out + "/a") == 0);
  CHECK(run_cli("simulate --seed 4" + out + "/b") == 0);
  CHECK(slurp(dir / "out" / "a" / "panel.csv") == slurp(dir / "out" / "b" / "panel.csv"));
  CHECK(fs::exists(dir / "out" / "a" / "calibration.json"));

  const std::string env = "CONTESTLAB_OUT=" + (dir / "env").string() + " ";
  CHECK(std::system((env + CONTESTLAB_CLI + " calibrate --seed 4 >/dev/null").c_str()) == 0);
  CHECK(fs::exists(dir / "env" / "calibration.txt"));
  fs::remove_all(dir);
}
