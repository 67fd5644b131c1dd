#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace contestlab::contest {

enum class Variant { baseline, reward_scaled, reward_theta_dependent, choking };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& name);

// Two-player Tullock contest. The lower-ability contestant's ability is
// normalized to 1, so theta_h is the relative skill advantage of the
// higher-ability contestant.
struct ContestModelSpec {
  Variant variant = Variant::baseline;
  double theta_h = 1.0;
  double reward_h = 1.0;
  double reward_l = 1.0;
  // Reward exponent for reward_theta_dependent, choking exponent for choking.
  double alpha = 0.0;

  static ContestModelSpec baseline(double theta_h, double reward_l = 1.0, double reward_h = 1.0);
  // R_l = multiplier * R_h.
  static ContestModelSpec reward_scaled(double theta_h, double multiplier, double reward_h = 1.0);
  // R_l = theta_h^alpha * R_h.
  static ContestModelSpec reward_theta_dependent(double theta_h, double alpha, double reward_h = 1.0);
  // Higher-ability contestant pays theta_h^-alpha per unit of effort.
  static ContestModelSpec choking(double theta_h, double alpha, double reward_l = 1.0,
                                  double reward_h = 1.0);

  // Same model at a different heterogeneity level. Rewards that depend on
  // theta_h are recomputed.
  ContestModelSpec at_theta(double theta) const;

  // Reward of the lower-ability contestant after applying the variant rule.
  double effective_reward_l() const;
  // Marginal effort cost of the higher-ability contestant (1 unless choking).
  double marginal_cost_h() const;

  // Throws ArgumentError when an invariant is violated.
  void validate() const;
};

struct EffortPair {
  double effort_l = 0.0;
  double effort_h = 0.0;
  double win_prob_l = 0.5;
  double win_prob_h = 0.5;
};

enum class Contestant { low, high };

// Logit contest success function. (0, 0) is a tie: (0.5, 0.5).
std::pair<double, double> win_probability(const ContestModelSpec& spec, double effort_l,
                                          double effort_h);

// Closed-form Nash equilibrium of the variant.
EffortPair equilibrium(const ContestModelSpec& spec);

// First-order-condition residuals (r_l, r_h); both efforts must be positive.
std::pair<double, double> foc_residuals(const ContestModelSpec& spec, double effort_l,
                                        double effort_h);

// Expected payoff p_i * R_i - cost_i(e_i).
double payoff(const ContestModelSpec& spec, Contestant who, double own_effort,
              double opponent_effort);

// Evenly spaced effort grid on [0, 2 * max(R_l, R_h)].
std::vector<double> default_effort_grid(const ContestModelSpec& spec, std::size_t points = 20001);

// Brute-force best response: the grid point with the highest payoff
// (first maximizer on ties).
double best_response_oracle(const ContestModelSpec& spec, double opponent_effort, Contestant who,
                            std::span<const double> grid);

struct NashOracleOptions {
  std::size_t max_iterations = 10000;
  double damping = 0.5;
};

// Damped iterated best response on the grid. Throws ConvergenceError with the
// last iterate when the iteration cap is reached.
EffortPair nash_oracle(const ContestModelSpec& spec, std::span<const double> grid,
                       const NashOracleOptions& options = {});

struct CurvePoint {
  double theta = 1.0;
  double effort_l = 0.0;
  double effort_h = 0.0;
  double win_prob_h = 0.5;
};

// Closed-form equilibria on n_points evenly spaced theta values in
// [theta_min, theta_max].
std::vector<CurvePoint> effort_curve(const ContestModelSpec& spec_template, double theta_max,
                                     std::size_t n_points, double theta_min = 1.0);

// CSV with header theta,e_l,e_h,p_h.
void write_effort_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

// Heterogeneity level at which the choking variant's e_h peaks (R_l = R_h):
// the root of d e_h / d theta, (2 alpha + 1)^(1 / (alpha + 1)).
double choking_peak_theta(double alpha);

}  // namespace contestlab::contest
