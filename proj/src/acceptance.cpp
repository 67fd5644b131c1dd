#include "contestlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "contestlab/contest_models.hpp"
#include "contestlab/parallel.hpp"
#include "contestlab/rng.hpp"

namespace contestlab::acceptance {

using report::json;
using scenario::Side;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <class Fn>
Criterion timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c = fn();
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

}  // namespace

// ---------------------------------------------------------------- 1, 2: contest models

Criterion equilibrium_exactness(std::uint64_t seed, int n_specs) {
  using contest::ContestModelSpec;
  struct Row {
    double residual = 0, gap_steps = 0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(n_specs));
  parallel_for(rows.size(), [&](std::size_t i) {
    Rng rng(seed, 100000 + i);
    const double theta = rng.uniform(1.0, 3.0);
    ContestModelSpec spec;
    switch (i % 4) {
      case 0: spec = ContestModelSpec::baseline(theta, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)); break;
      case 1: spec = ContestModelSpec::reward_scaled(theta, rng.uniform(0.5, 3.0), rng.uniform(0.5, 2.0)); break;
      case 2: spec = ContestModelSpec::reward_theta_dependent(theta, rng.uniform(0.0, 0.5), rng.uniform(0.5, 2.0)); break;
      default: spec = ContestModelSpec::choking(theta, rng.uniform(0.0, 0.5), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0));
    }
    const auto exact = contest::equilibrium(spec);
    const auto [rl, rh] = contest::foc_residuals(spec, exact.effort_l, exact.effort_h);
    const auto grid = contest::default_effort_grid(spec);
    const double step = grid[1] - grid[0];
    const auto oracle = contest::nash_oracle(spec, grid);
    rows[i] = {std::max(std::abs(rl), std::abs(rh)),
               std::max(std::abs(oracle.effort_l - exact.effort_l),
                        std::abs(oracle.effort_h - exact.effort_h)) / step};
  });
  double worst_res = 0, worst_gap = 0;
  for (const auto& r : rows) {
    worst_res = std::max(worst_res, r.residual);
    worst_gap = std::max(worst_gap, r.gap_steps);
  }
  Criterion c;
  c.number = 1;
  c.title = "Equilibrium exactness";
  c.passed = worst_res <= 1e-10 && worst_gap <= 1.0;
  c.detail = std::to_string(n_specs) + " specs, max FOC residual " + fmt("%.2e", worst_res) +
             ", max oracle gap " + fmt("%.3f", worst_gap) + " grid steps";
  c.metrics = {{"specs", n_specs}, {"max_foc_residual", worst_res}, {"max_oracle_gap_steps", worst_gap}};
  return c;
}

namespace {

struct Diffs {
  std::vector<double> theta;  // midpoints
  std::vector<double> dl, dh;
};

Diffs diffs(const std::vector<contest::CurvePoint>& curve) {
  Diffs d;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    d.theta.push_back(0.5 * (curve[i].theta + curve[i - 1].theta));
    d.dl.push_back(curve[i].effort_l - curve[i - 1].effort_l);
    d.dh.push_back(curve[i].effort_h - curve[i - 1].effort_h);
  }
  return d;
}

bool all_negative(const std::vector<double>& v) {
  for (double x : v)
    if (!(x < 0)) return false;
  return true;
}

int sign_changes(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t i = 1; i < v.size(); ++i) n += (v[i] > 0) != (v[i - 1] > 0);
  return n;
}

}  // namespace

Criterion model_curve_shapes() {
  using contest::ContestModelSpec;
  const std::size_t points = 201;
  const double theta_max = 3.0, a = 2.0, alpha = 0.2;
  const auto base = contest::effort_curve(ContestModelSpec::baseline(1.0), theta_max, points);
  const auto scaled = contest::effort_curve(ContestModelSpec::reward_scaled(1.0, a), theta_max, points);
  const auto dependent =
      contest::effort_curve(ContestModelSpec::reward_theta_dependent(1.0, alpha), theta_max, points);
  const auto choke = contest::effort_curve(ContestModelSpec::choking(1.0, alpha), theta_max, points);

  const Diffs db = diffs(base), ds = diffs(scaled), dd = diffs(dependent), dc = diffs(choke);

  const bool baseline_ok = all_negative(db.dl) && all_negative(db.dh);

  // Reward-scaled e_l: rising strictly below a, falling strictly above.
  bool flip_ok = true;
  for (std::size_t i = 0; i < ds.dl.size(); ++i) {
    const double lo = scaled[i].theta, hi = scaled[i + 1].theta;
    if (hi <= a) flip_ok = flip_ok && ds.dl[i] > 0;
    else if (lo >= a) flip_ok = flip_ok && ds.dl[i] < 0;
  }

  std::size_t peak = 0;
  for (std::size_t i = 1; i < choke.size(); ++i)
    if (choke[i].effort_h > choke[peak].effort_h) peak = i;
  const double peak_theta = choke[peak].theta;
  const bool peak_ok = sign_changes(dc.dh) == 1 && dc.dh.front() > 0 && dc.dh.back() < 0 &&
                       peak_theta >= 1.31 && peak_theta <= 1.34;

  const std::pair<const char*, const Diffs*> variants[] = {
      {"baseline", &db}, {"reward_scaled", &ds}, {"reward_theta_dependent", &dd}, {"choking", &dc}};
  json el = json::object();
  std::string not_decreasing;
  for (const auto& [name, d] : variants) {
    const bool dec = all_negative(d->dl);
    el[name] = dec;
    if (!dec) not_decreasing += std::string(not_decreasing.empty() ? "" : ", ") + name;
  }
  const bool el_ok = not_decreasing.empty();
  std::size_t dep_peak = 0;
  for (std::size_t i = 1; i < dependent.size(); ++i)
    if (dependent[i].effort_l > dependent[dep_peak].effort_l) dep_peak = i;

  Criterion c;
  c.number = 2;
  c.title = "Model curve shapes";
  c.passed = baseline_ok && flip_ok && peak_ok && el_ok;
  c.detail = std::string("baseline decreasing ") + (baseline_ok ? "yes" : "no") +
             ", reward-scaled e_l flips at 2 " + (flip_ok ? "yes" : "no") + ", choking e_h peak " +
             fmt("%.2f", peak_theta) + " (analytic " + fmt("%.4f", contest::choking_peak_theta(alpha)) +
             ") " + (peak_ok ? "ok" : "off") + ", e_l strictly decreasing in all variants " +
             (el_ok ? "yes" : "no (not in: " + not_decreasing + ")") +
             "; reward-theta-dependent e_l peaks at " + fmt("%.2f", dependent[dep_peak].theta);
  c.metrics = {{"grid_points", points},
               {"baseline_both_decreasing", baseline_ok},
               {"reward_scaled_e_l_flip_at_a", flip_ok},
               {"choking_e_h_peak_theta", peak_theta},
               {"choking_single_interior_peak", peak_ok},
               {"e_l_strictly_decreasing", el},
               {"reward_theta_dependent_e_l_peak_theta", dependent[dep_peak].theta}};
  return c;
}

// ---------------------------------------------------------------- 3: calibration

Criterion calibration(const scenario::ScenarioResult& run) {
  Criterion c;
  c.number = 3;
  c.title = "Calibration";
  c.passed = run.ok;
  c.metrics = run.data["moments"];
  std::string failed;
  for (const auto& m : c.metrics)
    if (!m["passed"].get<bool>()) failed += " " + m["name"].get<std::string>();
  c.detail = std::to_string(c.metrics.size()) + " moments on " +
             std::to_string(run.data["n_contests"].get<long>()) + " contests, " +
             (failed.empty() ? std::string("all within tolerance") : "outside:" + failed);
  return c;
}

// ---------------------------------------------------------------- 4, 7: linear and IV

std::pair<Criterion, Criterion> linear_and_iv_recovery(std::uint64_t seed, int replications) {
  const auto config = dgp::DgpConfig::calibrated();
  const auto& e = config.effects;
  const scenario::EstimatorOptions o;
  struct Rep {
    double bu, su, bf, sf;                 // table 2 column 3
    double biv, siv, bols, sols, fs, fsf;  // spillover on favorite performance
  };
  std::vector<Rep> reps(static_cast<std::size_t>(replications));
  parallel_for(reps.size(), [&](std::size_t r) {
    const Panel p = Panel::from_records(dgp::run_tournaments(config, stream_seed(seed, 2000 + r)));
    const auto u = est::fe_ols(p, scenario::performance_spec(Side::underdog, "performance_underdog", o));
    const auto f = est::fe_ols(p, scenario::performance_spec(Side::favorite, "performance_favorite", o));
    auto spec = scenario::spillover_spec("performance_favorite", o, false);
    const auto iv = est::tsls(p, spec, "expected_ability_next", "opponent_known");
    spec.regressors.insert(spec.regressors.begin(), "expected_ability_next");
    const auto ols = est::fe_ols(p, spec);
    reps[r] = {u.coef("ability_ratio"), u.se("ability_ratio"), f.coef("ability_ratio"),
               f.se("ability_ratio"), iv.coef("expected_ability_next"), iv.se("expected_ability_next"),
               ols.coef("expected_ability_next"), ols.se("expected_ability_next"),
               iv.first_stage->coefficient, iv.first_stage->f_stat};
  });

  int cov_u = 0, cov_f = 0, sign_u = 0, sign_f = 0, cov_iv = 0, miss_ols = 0, fs_ok = 0;
  double min_f = INFINITY, mean_iv = 0, mean_ols = 0;
  for (const auto& r : reps) {
    cov_u += std::abs(r.bu - e.beta_underdog_ratio) <= 2 * r.su;
    cov_f += std::abs(r.bf - e.beta_favorite_ratio) <= 2 * r.sf;
    sign_u += r.bu < 0;
    sign_f += r.bf > 0;
    cov_iv += std::abs(r.biv - e.delta_spillover_favorite) <= 2 * r.siv;
    miss_ols += std::abs(r.bols - e.delta_spillover_favorite) > 2 * r.sols;
    fs_ok += r.fs < 0 && r.fsf > 10;
    min_f = std::min(min_f, r.fsf);
    mean_iv += r.biv / replications;
    mean_ols += r.bols / replications;
  }
  const int n = replications;
  auto at_least = [n](int k, int per100) { return 100 * k >= per100 * n; };

  Criterion c4;
  c4.number = 4;
  c4.title = "Linear recovery";
  c4.passed = at_least(cov_u, 90) && at_least(cov_f, 90) && at_least(sign_u, 95) && at_least(sign_f, 95);
  c4.detail = "within 2 SE: underdog " + std::to_string(cov_u) + "/" + std::to_string(n) +
              ", favorite " + std::to_string(cov_f) + "/" + std::to_string(n) + "; correct sign " +
              std::to_string(sign_u) + "/" + std::to_string(n) + ", " + std::to_string(sign_f) + "/" +
              std::to_string(n);
  c4.metrics = {{"replications", n},
                {"truth", {{"underdog", e.beta_underdog_ratio}, {"favorite", e.beta_favorite_ratio}}},
                {"covered_2se", {{"underdog", cov_u}, {"favorite", cov_f}}},
                {"correct_sign", {{"underdog", sign_u}, {"favorite", sign_f}}}};

  Criterion c7;
  c7.number = 7;
  c7.title = "IV recovery";
  c7.passed = at_least(cov_iv, 90) && at_least(miss_ols, 80) && fs_ok == n;
  c7.detail = "2SLS within 2 SE " + std::to_string(cov_iv) + "/" + std::to_string(n) +
              ", OLS misses " + std::to_string(miss_ols) + "/" + std::to_string(n) +
              ", first stage negative with F > 10 in " + std::to_string(fs_ok) + "/" +
              std::to_string(n) + " (min F " + fmt("%.1f", min_f) + "), mean 2SLS " +
              fmt("%.3f", mean_iv) + " vs OLS " + fmt("%.3f", mean_ols);
  c7.metrics = {{"replications", n},
                {"truth", e.delta_spillover_favorite},
                {"tsls_covered_2se", cov_iv},
                {"ols_missed_2se", miss_ols},
                {"first_stage_negative_and_strong", fs_ok},
                {"min_first_stage_f", min_f},
                {"mean_tsls", mean_iv},
                {"mean_ols", mean_ols}};
  return {c4, c7};
}

// ---------------------------------------------------------------- 5, 6: dose response

namespace {

// Darts-scale design with closed-form nuisances:
// A = 1.055 + 0.049 (0.6 X + 0.8 e), Y = 90 + 4 X - 15 (A - 1) + N(0, 10^2).
double oracle_coverage(std::uint64_t seed, int reps) {
  const double sx = 0.6 * 0.049, se = 0.8 * 0.049;
  std::vector<double> share(static_cast<std::size_t>(reps));
  parallel_for(share.size(), [&](std::size_t r) {
    Rng rng(seed, 5000 + r);
    const long n = 2000;
    Eigen::VectorXd X(n), A(n), Y(n);
    for (long i = 0; i < n; ++i) {
      X[i] = rng.normal();
      A[i] = 1.055 + sx * X[i] + se * rng.normal();
      Y[i] = 90.0 + 4.0 * X[i] - 15.0 * (A[i] - 1.0) + rng.normal(0, 10);
    }
    est::Nuisances nu;
    nu.density = [&](double a, std::size_t j) {
      return phi((a - 1.055 - sx * X[static_cast<long>(j)]) / se) / se;
    };
    nu.outcome = [&](std::size_t j, double a) {
      return 90.0 + 4.0 * X[static_cast<long>(j)] - 15.0 * (a - 1.0);
    };
    const auto curve = est::dose_response(est::pseudo_outcome(A, Y, nu).xi, A);
    int covered = 0, supported = 0;
    for (std::size_t g = 0; g < curve.grid.size(); ++g) {
      if (!curve.supported(g)) continue;
      ++supported;
      const double truth = 90.0 + 4.0 * X.mean() - 15.0 * (curve.grid[g] - 1.0);
      covered += curve.lower[g] <= truth && truth <= curve.upper[g];
    }
    share[r] = supported ? static_cast<double>(covered) / supported : 0.0;
  });
  double total = 0;
  for (double s : share) total += s;
  return total / reps;
}

}  // namespace

Criterion dose_response_fidelity(std::uint64_t seed, int panels,
                                 const scenario::EstimatorOptions& options) {
  const auto config = dgp::DgpConfig::calibrated();
  std::vector<double> under, fav;
  // Panels run one after another; the forests inside are already parallel.
  for (int r = 0; r < panels; ++r) {
    const Panel p = Panel::from_records(
        dgp::run_tournaments(config, stream_seed(seed, 3000 + static_cast<std::uint64_t>(r))));
    for (Side side : {Side::underdog, Side::favorite}) {
      const auto res = est::dr_dose_response(
          p, scenario::dr_spec(side, std::string("performance_") + scenario::to_string(side)),
          scenario::dr_options(options, stream_seed(seed, 3100 + 2 * static_cast<std::uint64_t>(r) +
                                                             (side == Side::favorite))));
      (side == Side::underdog ? under : fav).push_back(scenario::step_effect(res));
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double mu = mean(under), mf = mean(fav);
  const double coverage = oracle_coverage(seed, 20);
  const bool u_ok = std::abs(mu + 0.75) <= 0.25, f_ok = std::abs(mf - 0.25) <= 0.25;

  Criterion c;
  c.number = 5;
  c.title = "Dose-response fidelity";
  c.passed = u_ok && f_ok && coverage >= 0.85;
  c.detail = "mean 0.05-step effect over " + std::to_string(panels) + " panels: underdog " +
             fmt("%.3f", mu) + " (target -0.75 +/- 0.25), favorite " + fmt("%.3f", mf) +
             " (target 0.25 +/- 0.25); oracle-nuisance coverage " + fmt("%.3f", coverage);
  c.metrics = {{"panels", panels},
               {"step_effects_underdog", under},
               {"step_effects_favorite", fav},
               {"mean_step_underdog", mu},
               {"mean_step_favorite", mf},
               {"oracle_coverage", coverage}};
  return c;
}

Criterion double_robustness(std::uint64_t seed) {
  // X ~ N(0, 1), A = 0.8 X + N(0, 1), Y = 3 A + 2 X + N(0, 1); true slope 3.
  const long n = 10000;
  Rng rng(seed, 6000);
  Eigen::VectorXd X(n), A(n), Y(n);
  for (long i = 0; i < n; ++i) {
    X[i] = rng.normal();
    A[i] = 0.8 * X[i] + rng.normal();
    Y[i] = 3.0 * A[i] + 2.0 * X[i] + rng.normal();
  }
  auto slope = [&](bool good_pi, bool good_mu) {
    est::Nuisances nu;
    if (good_pi)
      nu.density = [&](double a, std::size_t j) { return phi(a - 0.8 * X[static_cast<long>(j)]); };
    else
      nu.density = [](double a, std::size_t) { return phi(a / std::sqrt(1.64)) / std::sqrt(1.64); };
    if (good_mu)
      nu.outcome = [&](std::size_t j, double a) { return 3.0 * a + 2.0 * X[static_cast<long>(j)]; };
    else
      nu.outcome = [](std::size_t, double) { return 0.0; };
    return est::curve_slope(est::dose_response(est::pseudo_outcome(A, Y, nu).xi, A), -1.0, 1.0);
  };
  const double pi_only = slope(true, false), mu_only = slope(false, true), neither = slope(false, false);
  const double rel_pi = std::abs(pi_only - 3.0) / 3.0, rel_mu = std::abs(mu_only - 3.0) / 3.0,
               rel_none = std::abs(neither - 3.0) / 3.0;

  Criterion c;
  c.number = 6;
  c.title = "Double robustness";
  c.passed = rel_pi <= 0.10 && rel_mu <= 0.10 && rel_none > 0.10;
  c.detail = "slope (truth 3) with correct density only " + fmt("%.3f", pi_only) +
             ", correct outcome model only " + fmt("%.3f", mu_only) + ", both wrong " +
             fmt("%.3f", neither);
  c.metrics = {{"n", n},
               {"truth", 3.0},
               {"slope_density_only", pi_only},
               {"slope_outcome_only", mu_only},
               {"slope_both_wrong", neither}};
  return c;
}

// ---------------------------------------------------------------- 8, 9

Criterion headstart_recovery(std::uint64_t seed, int replications) {
  const auto config = scenario::default_config(scenario::Id::table5).dgp;
  const scenario::EstimatorOptions o;
  const double truth = config.effects.gamma_headstart_underdog;
  struct Rep {
    double b, s, low, high;
  };
  std::vector<Rep> reps(static_cast<std::size_t>(replications));
  parallel_for(reps.size(), [&](std::size_t r) {
    const Panel p = Panel::from_records(dgp::run_tournaments(config, stream_seed(seed, 4000 + r)));
    auto spec = scenario::performance_spec(Side::underdog, "performance_underdog", o);
    const auto main = est::fe_ols(p, spec);
    auto& x = spec.regressors;
    x.erase(std::remove(x.begin(), x.end(), "underdog_starts"), x.end());
    spec.interactions = {{"underdog_starts", "ability_ratio"}};
    const auto inter = est::fe_ols(p, spec);
    reps[r] = {main.coef("underdog_starts"), main.se("underdog_starts"),
               inter.coef("underdog_starts_x_low"), inter.coef("underdog_starts_x_high")};
  });
  int covered = 0, ordered = 0;
  double mean_b = 0, mean_low = 0, mean_high = 0;
  for (const auto& r : reps) {
    covered += std::abs(r.b - truth) <= 2 * r.s;
    ordered += r.high >= r.low;
    mean_b += r.b / replications;
    mean_low += r.low / replications;
    mean_high += r.high / replications;
  }
  Criterion c;
  c.number = 8;
  c.title = "Head-start recovery";
  c.passed = 100 * covered >= 90 * replications && mean_high >= mean_low;
  c.detail = "main effect within 2 SE of " + fmt("%.3f", truth) + " in " + std::to_string(covered) +
             "/" + std::to_string(replications) + " (mean " + fmt("%.3f", mean_b) +
             "); mean tercile interactions low " + fmt("%.3f", mean_low) + ", high " +
             fmt("%.3f", mean_high) + " (high >= low in " + std::to_string(ordered) + "/" +
             std::to_string(replications) + ")";
  c.metrics = {{"replications", replications},
               {"truth", truth},
               {"heterogeneity_slope", config.effects.gamma_headstart_heterogeneity},
               {"covered_2se", covered},
               {"mean_estimate", mean_b},
               {"mean_low_tercile", mean_low},
               {"mean_high_tercile", mean_high},
               {"high_ge_low", ordered}};
  return c;
}

Criterion placebo(const scenario::ScenarioResult& run) {
  Criterion c;
  c.number = 9;
  c.title = "Placebo";
  c.passed = run.ok;
  c.metrics = run.data;
  c.detail = "rejection rates at 5% over " + std::to_string(run.data["replications"].get<int>()) +
             " panels:";
  for (const auto& [name, v] : run.data["rejection_rate_5pct"].items())
    c.detail += " " + name + " " + fmt("%.2f", v.get<double>());
  c.detail += " (band [0.02, 0.10])";
  return c;
}

// ---------------------------------------------------------------- 10

std::vector<scenario::ScenarioResult> run_all_scenarios(std::uint64_t seed) {
  std::vector<scenario::ScenarioResult> out;
  for (auto id : scenario::all_ids()) {
    auto cfg = scenario::default_config(id);
    cfg.seed = seed;
    out.push_back(scenario::run(cfg));
  }
  return out;
}

namespace {

std::string panel_csv(std::uint64_t seed) {
  std::ostringstream s;
  dgp::export_panel(dgp::run_tournaments(dgp::DgpConfig::calibrated(), seed), s);
  return s.str();
}

}  // namespace

Criterion determinism(const std::vector<scenario::ScenarioResult>& reference, std::uint64_t seed,
                      std::size_t alt_threads) {
  const std::size_t saved = thread_setting();
  const std::string csv_ref = panel_csv(seed);
  // Always compare against a different worker count.
  if (worker_count() == alt_threads) alt_threads = 1;
  set_threads(alt_threads);
  std::vector<scenario::ScenarioResult> again;
  std::string csv_alt;
  try {
    again = run_all_scenarios(seed);
    csv_alt = panel_csv(seed);
  } catch (...) {
    set_threads(saved);
    throw;
  }
  set_threads(saved);

  int compared = 1;
  std::vector<std::string> differing;
  if (csv_ref != csv_alt) differing.push_back("panel.csv");
  for (std::size_t s = 0; s < reference.size(); ++s) {
    const auto& a = reference[s].artifacts;
    const auto& b = again[s].artifacts;
    if (a.size() != b.size()) {
      differing.push_back(std::string(scenario::to_string(reference[s].id)) + " (artifact count)");
      continue;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
      ++compared;
      if (a[k].name != b[k].name || a[k].content != b[k].content) differing.push_back(a[k].name);
    }
  }
  Criterion c;
  c.number = 10;
  c.title = "Determinism";
  c.passed = differing.empty();
  // Thread counts stay out of the report so it is itself identical across them.
  c.detail = std::to_string(compared) + " artifacts compared against a rerun with a different thread count, " +
             std::to_string(differing.size()) + " differ";
  for (const auto& d : differing) c.detail += " " + d;
  c.metrics = {{"artifacts_compared", compared}, {"differing", differing}};
  return c;
}

// ---------------------------------------------------------------- driver

bool Report::passed() const {
  for (const auto& c : criteria)
    if (!c.passed) return false;
  return !criteria.empty();
}

std::string Report::text(bool with_times) const {
  std::string out;
  for (const auto& c : criteria) {
    out += "C" + std::to_string(c.number) + (c.number < 10 ? "  " : " ") + (c.passed ? "PASS " : "FAIL ") +
           c.title + ": " + c.detail;
    if (with_times) out += fmt(" [%.1fs]", c.seconds);
    out += "\n";
  }
  int n_pass = 0;
  for (const auto& c : criteria) n_pass += c.passed;
  out += std::to_string(n_pass) + "/" + std::to_string(criteria.size()) + " criteria passed\n";
  return out;
}

json Report::to_json() const {
  json j = {{"passed", passed()}, {"criteria", json::array()}};
  for (const auto& c : criteria)
    j["criteria"].push_back({{"number", c.number},
                             {"title", c.title},
                             {"passed", c.passed},
                             {"detail", c.detail},
                             {"metrics", c.metrics}});
  return j;
}

Report run(const Options& o) {
  Report rep;
  auto& cr = rep.criteria;
  rep.scenarios = run_all_scenarios(o.seed);
  auto find = [&](scenario::Id id) -> const scenario::ScenarioResult& {
    for (const auto& s : rep.scenarios)
      if (s.id == id) return s;
    throw std::logic_error("scenario missing");
  };
  cr.push_back(timed([&] { return equilibrium_exactness(o.seed); }));
  cr.push_back(timed([&] { return model_curve_shapes(); }));
  cr.push_back(timed([&] { return calibration(find(scenario::Id::calibration)); }));
  Criterion c7;
  cr.push_back(timed([&] {
    auto [c4, iv] = linear_and_iv_recovery(o.seed, o.replications);
    c7 = iv;
    return c4;
  }));
  cr.push_back(timed([&] { return dose_response_fidelity(o.seed, o.dr_panels, {}); }));
  cr.push_back(timed([&] { return double_robustness(o.seed); }));
  cr.push_back(c7);
  cr.push_back(timed([&] { return headstart_recovery(o.seed, o.replications); }));
  cr.push_back(timed([&] { return placebo(find(scenario::Id::placebo)); }));
  cr.push_back(timed([&] { return determinism(rep.scenarios, o.seed, o.alt_threads); }));
  return rep;
}

}  // namespace contestlab::acceptance
