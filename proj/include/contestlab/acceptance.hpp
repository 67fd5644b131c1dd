#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contestlab/report.hpp"
#include "contestlab/scenarios.hpp"

namespace contestlab::acceptance {

struct Criterion {
  int number = 0;
  std::string title;
  bool passed = false;
  // One-line summary of the measured quantities.
  std::string detail;
  report::json metrics;
  // Wall time, reported in the text summary only so the JSON stays reproducible.
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 42;
  // Monte Carlo panels for criteria 4, 7, 8.
  int replications = 100;
  // Panels averaged for the dose-response step effects of criterion 5.
  int dr_panels = 8;
  // Criterion 10 reruns every scenario with this many workers (1 if the
  // reference run already used that many) and compares bytes.
  std::size_t alt_threads = 4;
};

struct Report {
  std::vector<Criterion> criteria;
  // Scenario outputs from the first (reference) pass, ready to be written.
  std::vector<scenario::ScenarioResult> scenarios;

  bool passed() const;
  // One line per criterion: "C<k> PASS|FAIL <title>: <detail>".
  std::string text(bool with_times = true) const;
  report::json to_json() const;
};

Criterion equilibrium_exactness(std::uint64_t seed, int n_specs = 1000);
Criterion model_curve_shapes();
Criterion calibration(const scenario::ScenarioResult& calibration_run);
// Criteria 4 and 7 share one set of calibrated panels.
std::pair<Criterion, Criterion> linear_and_iv_recovery(std::uint64_t seed, int replications);
Criterion dose_response_fidelity(std::uint64_t seed, int panels,
                                 const scenario::EstimatorOptions& options);
Criterion double_robustness(std::uint64_t seed);
Criterion headstart_recovery(std::uint64_t seed, int replications);
Criterion placebo(const scenario::ScenarioResult& placebo_run);

// Every scenario with its default config and the given seed.
std::vector<scenario::ScenarioResult> run_all_scenarios(std::uint64_t seed);
Criterion determinism(const std::vector<scenario::ScenarioResult>& reference, std::uint64_t seed,
                      std::size_t alt_threads);

Report run(const Options& options);

}  // namespace contestlab::acceptance
