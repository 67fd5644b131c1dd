#include "contestlab/contest_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "contestlab/errors.hpp"

namespace contestlab::contest {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::reward_scaled: return "reward_scaled";
    case Variant::reward_theta_dependent: return "reward_theta_dependent";
    case Variant::choking: return "choking";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  if (name == "baseline") return Variant::baseline;
  if (name == "reward_scaled") return Variant::reward_scaled;
  if (name == "reward_theta_dependent") return Variant::reward_theta_dependent;
  if (name == "choking") return Variant::choking;
  throw ArgumentError("unknown contest variant '" + name + "'");
}

ContestModelSpec ContestModelSpec::baseline(double theta_h, double reward_l, double reward_h) {
  ContestModelSpec s;
  s.variant = Variant::baseline;
  s.theta_h = theta_h;
  s.reward_l = reward_l;
  s.reward_h = reward_h;
  s.validate();
  return s;
}

ContestModelSpec ContestModelSpec::reward_scaled(double theta_h, double multiplier,
                                                 double reward_h) {
  ContestModelSpec s;
  s.variant = Variant::reward_scaled;
  s.theta_h = theta_h;
  s.reward_h = reward_h;
  s.reward_l = multiplier * reward_h;
  s.validate();
  return s;
}

ContestModelSpec ContestModelSpec::reward_theta_dependent(double theta_h, double alpha,
                                                          double reward_h) {
  ContestModelSpec s;
  s.variant = Variant::reward_theta_dependent;
  s.theta_h = theta_h;
  s.alpha = alpha;
  s.reward_h = reward_h;
  s.reward_l = std::pow(theta_h, alpha) * reward_h;
  s.validate();
  return s;
}

ContestModelSpec ContestModelSpec::choking(double theta_h, double alpha, double reward_l,
                                           double reward_h) {
  ContestModelSpec s;
  s.variant = Variant::choking;
  s.theta_h = theta_h;
  s.alpha = alpha;
  s.reward_l = reward_l;
  s.reward_h = reward_h;
  s.validate();
  return s;
}

ContestModelSpec ContestModelSpec::at_theta(double theta) const {
  ContestModelSpec s = *this;
  s.theta_h = theta;
  if (variant == Variant::reward_theta_dependent) s.reward_l = std::pow(theta, alpha) * reward_h;
  s.validate();
  return s;
}

double ContestModelSpec::effective_reward_l() const {
  if (variant == Variant::reward_theta_dependent) return std::pow(theta_h, alpha) * reward_h;
  return reward_l;
}

double ContestModelSpec::marginal_cost_h() const {
  return variant == Variant::choking ? std::pow(theta_h, -alpha) : 1.0;
}

void ContestModelSpec::validate() const {
  if (!(theta_h >= 1.0) || !std::isfinite(theta_h))
    throw ArgumentError("theta_h must be finite and >= 1");
  if (!(reward_h > 0.0) || !std::isfinite(reward_h))
    throw ArgumentError("reward_h must be positive");
  if (!(effective_reward_l() > 0.0) || !std::isfinite(effective_reward_l()))
    throw ArgumentError("reward_l must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ArgumentError("alpha must be >= 0");
}

std::pair<double, double> win_probability(const ContestModelSpec& spec, double effort_l,
                                          double effort_h) {
  if (effort_l < 0.0 || effort_h < 0.0) throw DomainError("effort must be non-negative");
  const double weighted_h = spec.theta_h * effort_h;
  const double total = effort_l + weighted_h;
  if (total <= 0.0) return {0.5, 0.5};
  const double p_h = weighted_h / total;
  return {1.0 - p_h, p_h};
}

EffortPair equilibrium(const ContestModelSpec& spec) {
  spec.validate();
  // The choking cost theta^-alpha * e_h is equivalent to a linear cost with
  // the reward of h scaled by theta^alpha; all variants reduce to the
  // baseline closed form with effective rewards.
  const double theta = spec.theta_h;
  const double r_l = spec.effective_reward_l();
  const double r_h = spec.reward_h / spec.marginal_cost_h();
  const double denom = (r_l + theta * r_h) * (r_l + theta * r_h);
  EffortPair e;
  e.effort_l = theta * r_l * r_l * r_h / denom;
  e.effort_h = theta * r_l * r_h * r_h / denom;
  const auto [p_l, p_h] = win_probability(spec, e.effort_l, e.effort_h);
  e.win_prob_l = p_l;
  e.win_prob_h = p_h;
  return e;
}

std::pair<double, double> foc_residuals(const ContestModelSpec& spec, double effort_l,
                                        double effort_h) {
  if (!(effort_l > 0.0) || !(effort_h > 0.0))
    throw DomainError("first-order conditions need strictly positive efforts");
  const double theta = spec.theta_h;
  const double total = effort_l + theta * effort_h;
  const double sq = total * total;
  const double r_l = theta * effort_h * spec.effective_reward_l() / sq - 1.0;
  const double r_h = theta * effort_l * spec.reward_h / sq - spec.marginal_cost_h();
  return {r_l, r_h};
}

double payoff(const ContestModelSpec& spec, Contestant who, double own_effort,
              double opponent_effort) {
  if (who == Contestant::low) {
    const auto [p_l, p_h] = win_probability(spec, own_effort, opponent_effort);
    (void)p_h;
    return p_l * spec.effective_reward_l() - own_effort;
  }
  const auto [p_l, p_h] = win_probability(spec, opponent_effort, own_effort);
  (void)p_l;
  return p_h * spec.reward_h - spec.marginal_cost_h() * own_effort;
}

std::vector<double> default_effort_grid(const ContestModelSpec& spec, std::size_t points) {
  if (points < 2) throw ArgumentError("effort grid needs at least two points");
  const double hi = 2.0 * std::max(spec.effective_reward_l(), spec.reward_h);
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = hi * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

double best_response_oracle(const ContestModelSpec& spec, double opponent_effort, Contestant who,
                            std::span<const double> grid) {
  if (grid.empty()) throw ArgumentError("best_response_oracle: empty grid");
  if (opponent_effort < 0.0) throw DomainError("opponent effort must be non-negative");
  double best = grid[0];
  double best_value = -std::numeric_limits<double>::infinity();
  for (double e : grid) {
    const double v = payoff(spec, who, e, opponent_effort);
    if (v > best_value) {
      best_value = v;
      best = e;
    }
  }
  return best;
}

namespace {

double grid_step(std::span<const double> grid) {
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < grid.size(); ++i) step = std::min(step, grid[i] - grid[i - 1]);
  return step;
}

}  // namespace

EffortPair nash_oracle(const ContestModelSpec& spec, std::span<const double> grid,
                       const NashOracleOptions& options) {
  spec.validate();
  if (grid.size() < 2) throw ArgumentError("nash_oracle: grid needs at least two points");
  const double step = grid_step(grid);
  const double d = options.damping;
  if (!(d > 0.0 && d <= 1.0)) throw ArgumentError("nash_oracle: damping must be in (0, 1]");

  double e_l = 0.25 * spec.effective_reward_l();
  double e_h = 0.25 * spec.reward_h;
  double damping = d;
  // Once both players are within a step of their grid best responses the
  // iterate either stops moving or circles a grid cell; in the latter case
  // the fixed point is the average over a window of iterations. When the
  // reward asymmetry is large the damped map can still spiral outwards, so
  // damping is halved whenever the gap fails to shrink over a stretch.
  constexpr std::size_t averaging_window = 256;
  constexpr std::size_t stall_window = 64;
  std::size_t in_window = 0;
  double sum_l = 0.0, sum_h = 0.0;
  double best_gap = std::numeric_limits<double>::infinity();
  std::size_t since_improvement = 0;
  for (std::size_t it = 0;; ++it) {
    if (it == options.max_iterations) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "nash_oracle: no fixed point within %zu iterations (last iterate %.6g, %.6g)",
                    options.max_iterations, e_l, e_h);
      throw ConvergenceError(buf);
    }
    const double b_l = best_response_oracle(spec, e_h, Contestant::low, grid);
    const double b_h = best_response_oracle(spec, e_l, Contestant::high, grid);
    const double gap = std::max(std::abs(b_l - e_l), std::abs(b_h - e_h));
    if (gap <= 1e-3 * step) {
      e_l = b_l;
      e_h = b_h;
      break;
    }
    if (gap <= 2.0 * step || in_window > 0) {
      sum_l += e_l;
      sum_h += e_h;
      if (++in_window == averaging_window) {
        e_l = sum_l / static_cast<double>(in_window);
        e_h = sum_h / static_cast<double>(in_window);
        break;
      }
    } else if (gap < 0.9 * best_gap) {
      best_gap = gap;
      since_improvement = 0;
    } else if (++since_improvement == stall_window) {
      damping *= 0.5;
      best_gap = gap;
      since_improvement = 0;
    }
    e_l = (1.0 - damping) * e_l + damping * b_l;
    e_h = (1.0 - damping) * e_h + damping * b_h;
  }
  EffortPair out;
  out.effort_l = e_l;
  out.effort_h = e_h;
  const auto [p_l, p_h] = win_probability(spec, e_l, e_h);
  out.win_prob_l = p_l;
  out.win_prob_h = p_h;
  return out;
}

std::vector<CurvePoint> effort_curve(const ContestModelSpec& spec_template, double theta_max,
                                     std::size_t n_points, double theta_min) {
  if (!(theta_min >= 1.0)) throw ArgumentError("effort_curve: theta range must start at >= 1");
  if (!(theta_max > theta_min)) throw ArgumentError("effort_curve: theta_max must exceed theta_min");
  if (n_points < 2) throw ArgumentError("effort_curve: need at least two points");
  std::vector<CurvePoint> curve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double theta = theta_min + (theta_max - theta_min) * static_cast<double>(i) /
                                         static_cast<double>(n_points - 1);
    const EffortPair e = equilibrium(spec_template.at_theta(theta));
    curve[i] = {theta, e.effort_l, e.effort_h, e.win_prob_h};
  }
  return curve;
}

void write_effort_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "theta,e_l,e_h,p_h\n";
  char buf[128];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", p.theta, p.effort_l, p.effort_h,
                  p.win_prob_h);
    out << buf;
  }
}

double choking_peak_theta(double alpha) {
  if (!(alpha > 0.0)) throw ArgumentError("choking peak exists only for alpha > 0");
  return std::pow(2.0 * alpha + 1.0, 1.0 / (alpha + 1.0));
}

}  // namespace contestlab::contest
