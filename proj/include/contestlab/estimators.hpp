#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contestlab/nuisance_learners.hpp"
#include "contestlab/panel.hpp"

namespace contestlab::est {

using ml::Bandwidth;
using ml::ForestParams;
using ml::Kernel;
using ml::OutOfSupportError;

using RowFilter = std::function<bool(const Panel&, std::size_t)>;

// variable times indicators for the low, medium and high terciles of `by`
// (cut points from the estimation sample). Adds three columns named
// <variable>_x_low, <variable>_x_medium and <variable>_x_high.
struct TercileInteraction {
  std::string variable;
  std::string by;
};

struct RegressionSpec {
  std::string label;
  std::string outcome;
  std::vector<std::string> regressors;
  std::vector<TercileInteraction> interactions;
  // Each entry names a column of group codes absorbed by demeaning.
  std::vector<std::string> fixed_effects;
  // Empty: heteroskedasticity-robust (HC1) errors.
  std::string cluster;
  RowFilter filter;
  double demean_tolerance = 1e-10;
  int demean_max_iter = 10000;
};

struct Design {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> names;
  // Panel row of each design row.
  std::vector<std::size_t> rows;
  // Dense group codes per fixed effect, and cluster codes (empty if none).
  std::vector<std::vector<int>> fe_codes;
  std::vector<int> cluster_codes;
  bool intercept = false;
};

// Rows with a missing value in any used column, or rejected by the filter,
// are dropped. Adds an intercept when there are no fixed effects.
Design build_design(const Panel& panel, const RegressionSpec& spec);

struct FirstStage {
  double coefficient = 0.0;
  double se = 0.0;
  double f_stat = 0.0;
  bool weak = false;
};

struct EstimateResult {
  std::string label;
  std::string method;  // "ols" or "2sls"
  std::string outcome;
  std::vector<std::string> names;
  Eigen::VectorXd beta;
  Eigen::MatrixXd vcov;
  long n_obs = 0;
  long n_clusters = 0;
  long singletons_dropped = 0;
  // Degrees of freedom of the t reference distribution.
  long df = 0;
  double r2_within = 0.0;
  std::optional<FirstStage> first_stage;
  std::vector<std::string> notes;

  std::size_t index(const std::string& name) const;
  double coef(const std::string& name) const { return beta[static_cast<long>(index(name))]; }
  double se(const std::string& name) const;
  double t_stat(const std::string& name) const { return coef(name) / se(name); }
  double p_value(const std::string& name) const;
  // Two-sided confidence interval at the given level.
  std::pair<double, double> ci(const std::string& name, double level = 0.90) const;
};

EstimateResult fe_ols(const Panel& panel, const RegressionSpec& spec);

// Just-identified 2SLS. spec.regressors are the exogenous covariates; the
// endogenous regressor is reported first.
EstimateResult tsls(const Panel& panel, const RegressionSpec& spec, const std::string& endogenous,
                    const std::string& instrument);

// Two-sided p-value of a t statistic.
double t_p_value(double t, long df);
// Critical value of the t distribution (df <= 0 uses the normal).
double t_critical(double level, long df);

// ---------------------------------------------------------------- doubly robust

// Nuisance functions over a sample of covariate rows x_1..x_n.
struct Nuisances {
  // pi(a | x_j)
  std::function<double(double a, std::size_t j)> density;
  // mu(x_j, a)
  std::function<double(std::size_t j, double a)> outcome;
  // Optional shortcuts for the covariate averages (1/n) sum_j pi(a | x_j) and
  // (1/n) sum_j mu(x_j, a). Computed by direct averaging when empty.
  std::function<double(double a)> density_average;
  std::function<double(double a)> outcome_average;
  // Optional values at the observed (x_i, A_i), e.g. out-of-bag fits.
  std::function<double(std::size_t i)> fitted_density;
  std::function<double(std::size_t i)> fitted_outcome;
};

struct PseudoOutcome {
  Eigen::VectorXd xi;
  long n_trimmed = 0;
};

// xi_i = (Y_i - mu(x_i, A_i)) / pi(A_i | x_i) * avg_j pi(A_i | x_j) + avg_j mu(x_j, A_i),
// with pi(A_i | x_i) floored at density_floor.
PseudoOutcome pseudo_outcome(const Eigen::VectorXd& A, const Eigen::VectorXd& Y,
                             const Nuisances& nuisances, double density_floor = 0.01);

struct CurveOptions {
  Kernel kernel = Kernel::epanechnikov;
  // Fixed bandwidth; 0 selects it by cross-validation over h_grid.
  double bandwidth = 0.0;
  // Multiples of sd(A); used when bandwidth is 0.
  std::vector<double> h_grid = {0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};
  int n_folds = 5;
  int points = 101;
  double lower_quantile = 0.01;
  double upper_quantile = 0.99;
  double level = 0.90;
  std::uint64_t seed = 1;
};

struct DoseResponseCurve {
  std::vector<double> grid;
  // NaN where the grid point has no kernel support.
  std::vector<double> estimate;
  std::vector<double> se;
  std::vector<double> lower;
  std::vector<double> upper;
  Bandwidth bandwidth;
  double level = 0.90;
  Eigen::VectorXd xi;

  bool supported(std::size_t g) const { return !std::isnan(estimate[g]); }
};

DoseResponseCurve dose_response(const Eigen::VectorXd& xi, const Eigen::VectorXd& A,
                                const CurveOptions& options = {});

// (E[Y^a1] - E[Y^a0]) / (a1 - a0) with both points snapped to the grid.
double ate_between(const DoseResponseCurve& curve, double a1, double a0);

// Least-squares slope of the curve over supported grid points in [a_lo, a_hi].
double curve_slope(const DoseResponseCurve& curve, double a_lo, double a_hi);

struct DrSpec {
  std::string outcome;
  std::string treatment;
  std::vector<std::string> covariates;
  RowFilter filter;
};

struct DrOptions {
  ForestParams outcome_forest;
  // Defaults to treatment_forest_params(n).
  std::optional<ForestParams> treatment_forest;
  double density_floor = 0.01;
  // Treatment grid for the covariate average of mu (exact at grid points,
  // linear in between).
  int outcome_grid_points = 256;
  CurveOptions curve;
  std::uint64_t seed = 1;
};

struct DrResult {
  DoseResponseCurve curve;
  long n_obs = 0;
  long n_trimmed = 0;
  double density_bandwidth = 0.0;
  Eigen::VectorXd treatment;
};

DrResult dr_dose_response(const Panel& panel, const DrSpec& spec, const DrOptions& options = {});

// Splits at the median of `variable`; ties go to the low panel. Rows with a
// missing value are left out of both.
std::pair<Panel, Panel> subsample_split(const Panel& panel, const std::string& variable);

}  // namespace contestlab::est
