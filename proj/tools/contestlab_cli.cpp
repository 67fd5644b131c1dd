// contestlab command-line front end.
//
//   contestlab simulate     [--config c.json] [--seed n] [--out dir]
//   contestlab estimate     --config c.json [--panel panel.csv] [--seed n] [--out dir]
//   contestlab model-curves [--variant v] [--alpha a] [--multiplier m] [--theta-min t] [--theta-max t] [--points n]
//   contestlab reproduce    [--seed n] [--out dir]
//   contestlab calibrate    [--config c.json] [--seed n] [--out dir]
//
// Exit codes: 0 success, 2 config or argument error, 3 data error, 4 acceptance failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "contestlab/acceptance.hpp"
#include "contestlab/contest_models.hpp"
#include "contestlab/errors.hpp"
#include "contestlab/panel.hpp"
#include "contestlab/parallel.hpp"
#include "contestlab/scenarios.hpp"
#include "contestlab/svg.hpp"

namespace cl = contestlab;
namespace sc = contestlab::scenario;

namespace {

constexpr int kOk = 0, kConfigError = 2, kDataError = 3, kAcceptanceFailure = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t threads = 0;
};

std::string describe(const cl::ParseError& e) {
  std::string s = e.what();
  if (e.row() >= 0 && s.find("line") == std::string::npos && s.find("row") == std::string::npos)
    s += " (row " + std::to_string(e.row()) + ")";
  return s;
}

sc::ScenarioConfig load(const Globals& g, sc::Id fallback) {
  sc::ScenarioConfig c;
  try {
    c = g.config.empty() ? sc::default_config(fallback) : sc::load_config(g.config);
  } catch (const cl::ParseError& e) {
    throw ConfigError(g.config + ": " + describe(e));
  } catch (const cl::ArgumentError& e) {
    throw ConfigError(g.config + ": " + e.what());
  }
  if (g.seed) c.seed = *g.seed;
  return c;
}

// --out, then $CONTESTLAB_OUT, then the config, then out/<default_leaf>.
std::string out_dir(const Globals& g, const std::string& from_config, const std::string& default_leaf) {
  if (!g.out.empty()) return g.out;
  if (const char* env = std::getenv("CONTESTLAB_OUT"); env && *env) return env;
  if (!from_config.empty()) return from_config;
  return (std::filesystem::path("out") / default_leaf).string();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

int cmd_simulate(const Globals& g) {
  const auto c = load(g, sc::Id::calibration);
  const auto dir = out_dir(g, c.out_dir, "simulate");
  const auto records = cl::dgp::run_tournaments(c.dgp, c.seed);
  const auto path = std::filesystem::path(dir) / "panel.csv";
  std::filesystem::create_directories(dir);
  cl::dgp::export_panel(records, path.string());
  write_file(std::filesystem::path(dir) / "config.json", sc::config_to_json(c));
  std::cout << "wrote " << records.size() << " contests to " << path.string() << "\n";
  if (c.id == sc::Id::calibration) {
    const auto r = sc::run(c);
    sc::write_artifacts(r, dir);
    std::cout << r.text;
  }
  return kOk;
}

int cmd_estimate(const Globals& g, const std::string& panel_path) {
  if (g.config.empty()) throw ConfigError("estimate needs --config");
  const auto c = load(g, sc::Id::table2);
  std::optional<cl::Panel> panel;
  if (!panel_path.empty()) panel = cl::Panel::read_csv(panel_path);
  const auto r = sc::run(c, panel ? &*panel : nullptr);
  const auto dir = out_dir(g, c.out_dir, sc::to_string(c.id));
  sc::write_artifacts(r, dir);
  std::cout << r.text << "artifacts in " << dir << "\n";
  return r.ok ? kOk : kAcceptanceFailure;
}

struct CurveArgs {
  std::string variant = "choking";
  double alpha = 0.2;
  double multiplier = 2.0;
  double theta_min = 1.0;
  double theta_max = 3.0;
  std::size_t points = 201;
};

int cmd_model_curves(const Globals& g, const CurveArgs& a) {
  using cl::contest::ContestModelSpec;
  using cl::contest::Variant;
  if (a.theta_min < 1.0 || a.theta_max <= a.theta_min)
    throw cl::ArgumentError("theta range must satisfy 1 <= theta-min < theta-max");
  if (a.points < 2) throw cl::ArgumentError("--points must be >= 2");
  ContestModelSpec spec;
  switch (cl::contest::variant_from_string(a.variant)) {
    case Variant::baseline: spec = ContestModelSpec::baseline(1.0); break;
    case Variant::reward_scaled: spec = ContestModelSpec::reward_scaled(1.0, a.multiplier); break;
    case Variant::reward_theta_dependent: spec = ContestModelSpec::reward_theta_dependent(1.0, a.alpha); break;
    case Variant::choking: spec = ContestModelSpec::choking(1.0, a.alpha); break;
  }
  spec.validate();
  const auto curve = cl::contest::effort_curve(spec, a.theta_max, a.points, a.theta_min);
  const auto dir = std::filesystem::path(out_dir(g, "", "model-curves"));
  std::ostringstream csv;
  cl::contest::write_effort_curve_csv(csv, curve);
  write_file(dir / (a.variant + ".csv"), csv.str());

  cl::svg::LineChart chart;
  chart.title = "Equilibrium effort: " + a.variant;
  chart.x_label = "theta_h";
  chart.y_label = "effort";
  cl::svg::Series l{"e_l", {}, {}, {}, {}, "#c0392b", false};
  cl::svg::Series h{"e_h", {}, {}, {}, {}, "#1f4e9c", true};
  for (const auto& p : curve) {
    l.x.push_back(p.theta);
    l.y.push_back(p.effort_l);
    h.x.push_back(p.theta);
    h.y.push_back(p.effort_h);
  }
  chart.series = {l, h};
  if (spec.variant == Variant::choking) {
    const double t = cl::contest::choking_peak_theta(a.alpha);
    if (t >= a.theta_min && t <= a.theta_max)
      chart.markers.push_back({t, "e_h peak " + cl::report::fixed(t, 4)});
  }
  if (spec.variant == Variant::reward_scaled && a.multiplier >= a.theta_min && a.multiplier <= a.theta_max)
    chart.markers.push_back({a.multiplier, "theta = a"});
  write_file(dir / (a.variant + ".svg"), cl::svg::render(chart));
  std::cout << "wrote " << (dir / (a.variant + ".csv")).string() << " and .svg\n";
  return kOk;
}

int cmd_reproduce(const Globals& g) {
  cl::acceptance::Options o;
  if (g.seed) o.seed = *g.seed;
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = cl::acceptance::run(o);
  const std::filesystem::path dir = out_dir(g, "", "");
  for (const auto& s : report.scenarios) sc::write_artifacts(s, (dir / sc::to_string(s.id)).string());
  write_file(dir / "acceptance.json", cl::report::dump(report.to_json()));
  write_file(dir / "acceptance.txt", report.text(false));
  std::cout << report.text();
  std::printf("total %.1fs; artifacts in %s\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
              dir.string().c_str());
  return report.passed() ? kOk : kAcceptanceFailure;
}

int cmd_calibrate(const Globals& g) {
  auto c = load(g, sc::Id::calibration);
  c.id = sc::Id::calibration;
  const auto r = sc::run(c);
  const auto dir = out_dir(g, c.out_dir, "calibration");
  sc::write_artifacts(r, dir);
  std::cout << r.text;
  return r.ok ? kOk : kAcceptanceFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contest heterogeneity lab: contest models, darts tournament simulation and estimators"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "scenario config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed, overrides the config");
  app.add_option("--out", g.out, "output directory (else $CONTESTLAB_OUT, the config, out/<name>)");
  app.add_option("--threads", g.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);

  auto* simulate = app.add_subcommand("simulate", "simulate a tournament panel and write it as CSV");
  std::string panel_path;
  auto* estimate = app.add_subcommand("estimate", "run a scenario's estimators and write tables or figures");
  estimate->add_option("--panel", panel_path, "panel CSV; simulated from the config when absent");
  CurveArgs curve;
  auto* curves = app.add_subcommand("model-curves", "equilibrium effort curves as CSV and SVG");
  curves->add_option("--variant", curve.variant, "baseline, reward_scaled, reward_theta_dependent or choking");
  curves->add_option("--alpha", curve.alpha, "reward or choking exponent");
  curves->add_option("--multiplier", curve.multiplier, "a in R_l = a R_h");
  curves->add_option("--theta-min", curve.theta_min);
  curves->add_option("--theta-max", curve.theta_max);
  curves->add_option("--points", curve.points);
  auto* reproduce = app.add_subcommand("reproduce", "run every scenario and the acceptance suite");
  auto* calibrate = app.add_subcommand("calibrate", "compare simulated moments with the calibration targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (seed_opt->count()) g.seed = seed;
  cl::set_threads(g.threads);

  try {
    if (*simulate) return cmd_simulate(g);
    if (*estimate) return cmd_estimate(g, panel_path);
    if (*curves) return cmd_model_curves(g, curve);
    if (*reproduce) return cmd_reproduce(g);
    if (*calibrate) return cmd_calibrate(g);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cl::MissingColumnError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const cl::ParseError& e) {
    std::cerr << "data error: " << describe(e) << "\n";
    return kDataError;
  } catch (const cl::EstimationError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const cl::ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cl::DomainError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
