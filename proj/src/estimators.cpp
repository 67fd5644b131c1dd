#include "contestlab/estimators.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <numeric>

#include "contestlab/parallel.hpp"
#include "contestlab/rng.hpp"

namespace contestlab::est {

using namespace ml;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

// Dense 0-based codes; returns the number of levels.
int densify(const std::vector<double>& raw, std::vector<int>& codes) {
  std::map<double, int> ids;
  codes.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto [it, fresh] = ids.emplace(raw[i], static_cast<int>(ids.size()));
    codes[i] = it->second;
  }
  return static_cast<int>(ids.size());
}

int densify(std::vector<int>& codes) {
  std::vector<double> raw(codes.begin(), codes.end());
  return densify(raw, codes);
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double sd(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / std::max<double>(1.0, v.size() - 1.0));
}

struct Prepared {
  Design design;
  Eigen::VectorXd y;  // demeaned
  Eigen::MatrixXd X;  // demeaned
  long singletons = 0;
  long fe_dof = 0;
  long n_clusters = 0;
  std::vector<int> clusters;  // per row; row index when unclustered
};

long drop_singletons(Design& d) {
  if (d.fe_codes.empty()) return 0;
  long dropped = 0;
  for (;;) {
    std::vector<char> keep(d.rows.size(), 1);
    bool any = false;
    for (auto& codes : d.fe_codes) {
      const int levels = densify(codes);
      std::vector<int> count(static_cast<std::size_t>(levels), 0);
      for (int c : codes) ++count[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < codes.size(); ++i)
        if (count[static_cast<std::size_t>(codes[i])] == 1) {
          keep[i] = 0;
          any = true;
        }
    }
    if (!any) return dropped;
    std::vector<long> idx;
    for (std::size_t i = 0; i < keep.size(); ++i)
      if (keep[i]) idx.push_back(static_cast<long>(i));
    dropped += static_cast<long>(keep.size() - idx.size());
    if (idx.empty()) throw EstimationError("every observation is a fixed-effect singleton");
    Design out;
    out.names = d.names;
    out.intercept = d.intercept;
    out.y.resize(static_cast<long>(idx.size()));
    out.X.resize(static_cast<long>(idx.size()), d.X.cols());
    out.fe_codes.resize(d.fe_codes.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const long i = idx[k];
      out.y[static_cast<long>(k)] = d.y[i];
      out.X.row(static_cast<long>(k)) = d.X.row(i);
      out.rows.push_back(d.rows[static_cast<std::size_t>(i)]);
      for (std::size_t f = 0; f < d.fe_codes.size(); ++f)
        out.fe_codes[f].push_back(d.fe_codes[f][static_cast<std::size_t>(i)]);
      if (!d.cluster_codes.empty())
        out.cluster_codes.push_back(d.cluster_codes[static_cast<std::size_t>(i)]);
    }
    d = std::move(out);
  }
}

// Alternating projections onto the fixed-effect group means.
void demean(Eigen::MatrixXd& M, const std::vector<std::vector<int>>& codes, double tol,
            int max_iter) {
  if (codes.empty()) return;
  std::vector<int> levels;
  for (const auto& c : codes) levels.push_back(*std::max_element(c.begin(), c.end()) + 1);
  std::vector<std::vector<double>> counts(codes.size());
  for (std::size_t f = 0; f < codes.size(); ++f) {
    counts[f].assign(static_cast<std::size_t>(levels[f]), 0.0);
    for (int c : codes[f]) counts[f][static_cast<std::size_t>(c)] += 1.0;
  }
  const long n = M.rows();
  parallel_for(static_cast<std::size_t>(M.cols()), [&](std::size_t col) {
    double* v = M.data() + static_cast<long>(col) * n;
    const double scale = std::max(1.0, Eigen::Map<Eigen::VectorXd>(v, n).cwiseAbs().maxCoeff());
    std::vector<double> sums;
    for (int it = 0; it < max_iter; ++it) {
      double change = 0.0;
      for (std::size_t f = 0; f < codes.size(); ++f) {
        sums.assign(static_cast<std::size_t>(levels[f]), 0.0);
        const auto& cf = codes[f];
        for (long i = 0; i < n; ++i) sums[static_cast<std::size_t>(cf[static_cast<std::size_t>(i)])] += v[i];
        for (std::size_t g = 0; g < sums.size(); ++g) {
          sums[g] /= counts[f][g];
          change = std::max(change, std::abs(sums[g]));
        }
        for (long i = 0; i < n; ++i) v[i] -= sums[static_cast<std::size_t>(cf[static_cast<std::size_t>(i)])];
      }
      // One projection suffices for a single group.
      if (change <= tol * scale || codes.size() == 1) return;
    }
    throw ConvergenceError("fixed-effect demeaning did not converge in " +
                           std::to_string(max_iter) + " iterations");
  });
}

Prepared prepare(const Panel& panel, const RegressionSpec& spec) {
  Prepared p;
  p.design = build_design(panel, spec);
  auto& d = p.design;
  p.singletons = drop_singletons(d);
  const long n = d.X.rows();

  Eigen::MatrixXd M(n, d.X.cols() + 1);
  M.col(0) = d.y;
  M.rightCols(d.X.cols()) = d.X;
  demean(M, d.fe_codes, spec.demean_tolerance, spec.demean_max_iter);
  p.y = M.col(0);
  p.X = M.rightCols(d.X.cols());

  if (d.cluster_codes.empty()) {
    p.clusters.resize(static_cast<std::size_t>(n));
    std::iota(p.clusters.begin(), p.clusters.end(), 0);
    p.n_clusters = n;
  } else {
    p.clusters = d.cluster_codes;
    p.n_clusters = densify(p.clusters);
  }
  // Absorbed parameters, except groups nested within clusters.
  for (auto& codes : d.fe_codes) {
    const int levels = densify(codes);
    bool nested = !d.cluster_codes.empty();
    if (nested) {
      std::vector<int> owner(static_cast<std::size_t>(levels), -1);
      for (std::size_t i = 0; i < codes.size() && nested; ++i) {
        int& o = owner[static_cast<std::size_t>(codes[i])];
        if (o < 0) o = p.clusters[i];
        else if (o != p.clusters[i]) nested = false;
      }
    }
    if (!nested) p.fe_dof += levels - 1;
  }
  if (!d.fe_codes.empty()) p.fe_dof += 1;
  return p;
}

// Column-equilibrated QR; throws naming the columns that are linear
// combinations of the others.
void check_rank(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
  std::vector<std::string> bad;
  Eigen::VectorXd norms = X.colwise().norm();
  const double top = norms.size() ? norms.maxCoeff() : 0.0;
  Eigen::MatrixXd S = X;
  for (long j = 0; j < X.cols(); ++j) {
    if (!(norms[j] > 1e-12 * std::max(1.0, top))) {
      bad.push_back(names[static_cast<std::size_t>(j)]);
      S.col(j).setZero();
    } else {
      S.col(j) /= norms[j];
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(S);
  qr.setThreshold(1e-9);
  if (bad.empty() && qr.rank() == X.cols()) return;
  if (bad.empty()) {
    const auto& perm = qr.colsPermutation().indices();
    for (long k = qr.rank(); k < X.cols(); ++k) bad.push_back(names[static_cast<std::size_t>(perm[k])]);
  }
  throw EstimationError("rank-deficient design after fixed-effect absorption; collinear column(s): " +
                        join(bad));
}

Eigen::MatrixXd inverse_gram(const Eigen::MatrixXd& X) {
  const Eigen::VectorXd norms = X.colwise().norm();
  const Eigen::VectorXd inv = norms.cwiseInverse();
  const Eigen::MatrixXd S = X * inv.asDiagonal();
  const Eigen::MatrixXd G = S.transpose() * S;
  const Eigen::MatrixXd Ginv = G.ldlt().solve(Eigen::MatrixXd::Identity(G.rows(), G.cols()));
  return inv.asDiagonal() * Ginv * inv.asDiagonal();
}

// CR1 sandwich; reduces to HC1 when every cluster is one row.
Eigen::MatrixXd sandwich(const Eigen::MatrixXd& Xs, const Eigen::VectorXd& e,
                         const Eigen::MatrixXd& bread, const std::vector<int>& clusters,
                         long n_clusters, long k) {
  const long n = Xs.rows(), p = Xs.cols();
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n_clusters, p);
  for (long i = 0; i < n; ++i) scores.row(clusters[static_cast<std::size_t>(i)]) += Xs.row(i) * e[i];
  const Eigen::MatrixXd meat = scores.transpose() * scores;
  const double G = static_cast<double>(n_clusters), N = static_cast<double>(n);
  if (n_clusters < 2 || n <= k)
    throw EstimationError("too few clusters or observations for the covariance estimate");
  const double c = G / (G - 1.0) * (N - 1.0) / (N - static_cast<double>(k));
  Eigen::MatrixXd V = c * bread * meat * bread;
  return 0.5 * (V + V.transpose());
}

EstimateResult base_result(const RegressionSpec& spec, const Prepared& p, const char* method) {
  EstimateResult r;
  r.label = spec.label;
  r.method = method;
  r.outcome = spec.outcome;
  r.names = p.design.names;
  r.n_obs = p.X.rows();
  r.n_clusters = spec.cluster.empty() ? 0 : p.n_clusters;
  r.singletons_dropped = p.singletons;
  if (p.singletons > 0)
    r.notes.push_back(std::to_string(p.singletons) + " singleton observation(s) dropped");
  return r;
}

}  // namespace

// ---------------------------------------------------------------- design

Design build_design(const Panel& panel, const RegressionSpec& spec) {
  if (spec.outcome.empty()) throw ArgumentError("regression needs an outcome");
  std::vector<std::string> used{spec.outcome};
  for (const auto& r : spec.regressors) used.push_back(r);
  for (const auto& t : spec.interactions) {
    used.push_back(t.variable);
    used.push_back(t.by);
  }
  for (const auto& f : spec.fixed_effects) used.push_back(f);
  if (!spec.cluster.empty()) used.push_back(spec.cluster);
  panel.require(used);

  std::vector<const std::vector<double>*> cols;
  for (const auto& u : used) cols.push_back(&panel.col(u));
  Design d;
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    if (spec.filter && !spec.filter(panel, i)) continue;
    bool ok = true;
    for (const auto* c : cols) ok = ok && std::isfinite((*c)[i]);
    if (ok) d.rows.push_back(i);
  }
  if (d.rows.empty()) throw EstimationError("empty estimation sample for '" + spec.outcome + "'");
  const long n = static_cast<long>(d.rows.size());

  auto gather = [&](const std::string& name) {
    const auto& c = panel.col(name);
    Eigen::VectorXd v(n);
    for (long i = 0; i < n; ++i) v[i] = c[d.rows[static_cast<std::size_t>(i)]];
    return v;
  };
  d.y = gather(spec.outcome);
  std::vector<Eigen::VectorXd> xs;
  for (const auto& r : spec.regressors) {
    xs.push_back(gather(r));
    d.names.push_back(r);
  }
  for (const auto& t : spec.interactions) {
    const Eigen::VectorXd v = gather(t.variable), by = gather(t.by);
    std::vector<double> byv(by.data(), by.data() + n);
    const double q1 = quantile(byv, 1.0 / 3.0), q2 = quantile(byv, 2.0 / 3.0);
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(n), mid = lo, hi = lo;
    for (long i = 0; i < n; ++i) {
      Eigen::VectorXd& dst = by[i] <= q1 ? lo : (by[i] <= q2 ? mid : hi);
      dst[i] = v[i];
    }
    xs.push_back(lo);
    xs.push_back(mid);
    xs.push_back(hi);
    d.names.push_back(t.variable + "_x_low");
    d.names.push_back(t.variable + "_x_medium");
    d.names.push_back(t.variable + "_x_high");
  }
  d.intercept = spec.fixed_effects.empty();
  if (d.intercept) {
    xs.push_back(Eigen::VectorXd::Ones(n));
    d.names.emplace_back("(intercept)");
  }
  if (xs.empty()) throw ArgumentError("regression needs at least one regressor");
  d.X.resize(n, static_cast<long>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) d.X.col(static_cast<long>(j)) = xs[j];

  for (const auto& f : spec.fixed_effects) {
    const Eigen::VectorXd raw = gather(f);
    std::vector<int> codes;
    densify(std::vector<double>(raw.data(), raw.data() + n), codes);
    d.fe_codes.push_back(std::move(codes));
  }
  if (!spec.cluster.empty()) {
    const Eigen::VectorXd raw = gather(spec.cluster);
    densify(std::vector<double>(raw.data(), raw.data() + n), d.cluster_codes);
  }
  return d;
}

// ---------------------------------------------------------------- inference

double t_p_value(double t, long df) {
  if (!std::isfinite(t)) return std::isnan(t) ? t : 0.0;
  if (df <= 0) {
    const boost::math::normal z;
    return 2.0 * boost::math::cdf(boost::math::complement(z, std::abs(t)));
  }
  const boost::math::students_t dist(static_cast<double>(df));
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double t_critical(double level, long df) {
  if (!(level > 0 && level < 1)) throw ArgumentError("confidence level must lie in (0, 1)");
  const double q = 0.5 + 0.5 * level;
  if (df <= 0) return boost::math::quantile(boost::math::normal(), q);
  return boost::math::quantile(boost::math::students_t(static_cast<double>(df)), q);
}

std::size_t EstimateResult::index(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ArgumentError("no coefficient named '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

double EstimateResult::se(const std::string& name) const {
  const auto i = static_cast<long>(index(name));
  return std::sqrt(std::max(0.0, vcov(i, i)));
}

double EstimateResult::p_value(const std::string& name) const {
  const double s = se(name);
  if (s == 0.0) return coef(name) == 0.0 ? 1.0 : 0.0;
  return t_p_value(coef(name) / s, df);
}

std::pair<double, double> EstimateResult::ci(const std::string& name, double level) const {
  const double c = t_critical(level, df) * se(name);
  return {coef(name) - c, coef(name) + c};
}

// ---------------------------------------------------------------- estimators

EstimateResult fe_ols(const Panel& panel, const RegressionSpec& spec) {
  Prepared p = prepare(panel, spec);
  check_rank(p.X, p.design.names);
  const long k = p.X.cols() + p.fe_dof;
  const Eigen::MatrixXd bread = inverse_gram(p.X);
  const Eigen::VectorXd beta = bread * (p.X.transpose() * p.y);
  const Eigen::VectorXd e = p.y - p.X * beta;

  EstimateResult r = base_result(spec, p, "ols");
  r.beta = beta;
  r.vcov = sandwich(p.X, e, bread, p.clusters, p.n_clusters, k);
  r.df = spec.cluster.empty() ? r.n_obs - k : p.n_clusters - 1;
  const Eigen::VectorXd yc =
      p.design.intercept ? Eigen::VectorXd(p.y.array() - p.y.mean()) : p.y;
  const double sst = yc.squaredNorm();
  r.r2_within = sst > 0 ? 1.0 - e.squaredNorm() / sst : 0.0;
  return r;
}

EstimateResult tsls(const Panel& panel, const RegressionSpec& spec, const std::string& endogenous,
                    const std::string& instrument) {
  if (endogenous.empty() || instrument.empty())
    throw ArgumentError("2SLS needs an endogenous regressor and an instrument");
  RegressionSpec full = spec;
  full.regressors.insert(full.regressors.begin(), {endogenous, instrument});
  if (!spec.interactions.empty()) throw ArgumentError("2SLS does not support interactions");
  Prepared p = prepare(panel, full);
  const long n = p.X.rows(), w = p.X.cols() - 2;

  // Columns: [D, Z, W...]. First stage regresses D on [Z, W].
  Eigen::MatrixXd ZW(n, w + 1);
  ZW.col(0) = p.X.col(1);
  ZW.rightCols(w) = p.X.rightCols(w);
  std::vector<std::string> zw_names{instrument};
  for (long j = 0; j < w; ++j) zw_names.push_back(p.design.names[static_cast<std::size_t>(j + 2)]);
  check_rank(ZW, zw_names);
  const Eigen::VectorXd D = p.X.col(0);
  const long k = w + 1 + p.fe_dof;
  const Eigen::MatrixXd bread1 = inverse_gram(ZW);
  const Eigen::VectorXd pi = bread1 * (ZW.transpose() * D);
  const Eigen::VectorXd v = D - ZW * pi;
  const Eigen::MatrixXd V1 = sandwich(ZW, v, bread1, p.clusters, p.n_clusters, k);

  FirstStage fs;
  fs.coefficient = pi[0];
  fs.se = std::sqrt(std::max(0.0, V1(0, 0)));
  fs.f_stat = fs.se > 0 ? (fs.coefficient / fs.se) * (fs.coefficient / fs.se) : INFINITY;
  fs.weak = fs.f_stat < 10.0;

  Eigen::MatrixXd Xa(n, w + 1), Xh(n, w + 1);
  Xa.col(0) = D;
  Xa.rightCols(w) = p.X.rightCols(w);
  Xh.col(0) = ZW * pi;
  Xh.rightCols(w) = p.X.rightCols(w);
  std::vector<std::string> names{endogenous};
  for (long j = 0; j < w; ++j) names.push_back(p.design.names[static_cast<std::size_t>(j + 2)]);
  check_rank(Xh, names);
  const Eigen::MatrixXd bread = inverse_gram(Xh);
  const Eigen::VectorXd beta = bread * (Xh.transpose() * p.y);
  const Eigen::VectorXd e = p.y - Xa * beta;

  EstimateResult r = base_result(spec, p, "2sls");
  r.names = names;
  r.beta = beta;
  r.vcov = sandwich(Xh, e, bread, p.clusters, p.n_clusters, k);
  r.df = spec.cluster.empty() ? n - k : p.n_clusters - 1;
  const Eigen::VectorXd yc =
      p.design.intercept ? Eigen::VectorXd(p.y.array() - p.y.mean()) : p.y;
  const double sst = yc.squaredNorm();
  r.r2_within = sst > 0 ? 1.0 - e.squaredNorm() / sst : 0.0;
  r.first_stage = fs;
  if (fs.weak) r.notes.push_back("weak first stage: F < 10");
  return r;
}

// ---------------------------------------------------------------- doubly robust

PseudoOutcome pseudo_outcome(const Eigen::VectorXd& A, const Eigen::VectorXd& Y,
                             const Nuisances& nu, double density_floor) {
  const long n = A.size();
  if (n == 0 || Y.size() != n) throw ArgumentError("pseudo_outcome: A and Y must match");
  if (!nu.density || !nu.outcome) throw ArgumentError("pseudo_outcome: missing nuisance function");
  if (!(density_floor > 0)) throw ArgumentError("pseudo_outcome: density floor must be positive");
  const auto nn = static_cast<std::size_t>(n);

  auto density_avg = [&](double a) {
    if (nu.density_average) return nu.density_average(a);
    double s = 0.0;
    for (std::size_t j = 0; j < nn; ++j) s += nu.density(a, j);
    return s / static_cast<double>(n);
  };
  auto outcome_avg = [&](double a) {
    if (nu.outcome_average) return nu.outcome_average(a);
    double s = 0.0;
    for (std::size_t j = 0; j < nn; ++j) s += nu.outcome(j, a);
    return s / static_cast<double>(n);
  };

  PseudoOutcome out;
  out.xi.resize(n);
  std::vector<char> trimmed(nn, 0);
  parallel_for(nn, [&](std::size_t i) {
    const double a = A[static_cast<long>(i)];
    double pi = nu.fitted_density ? nu.fitted_density(i) : nu.density(a, i);
    if (!(pi >= density_floor)) {
      pi = density_floor;
      trimmed[i] = 1;
    }
    const double mu = nu.fitted_outcome ? nu.fitted_outcome(i) : nu.outcome(i, a);
    out.xi[static_cast<long>(i)] =
        (Y[static_cast<long>(i)] - mu) / pi * density_avg(a) + outcome_avg(a);
  });
  out.n_trimmed = std::count(trimmed.begin(), trimmed.end(), 1);
  if (out.n_trimmed == n) throw EstimationError("pseudo_outcome: every row hit the density floor");
  if (!out.xi.allFinite()) throw EstimationError("pseudo_outcome: non-finite values");
  return out;
}

DoseResponseCurve dose_response(const Eigen::VectorXd& xi, const Eigen::VectorXd& A,
                                const CurveOptions& o) {
  if (xi.size() != A.size() || A.size() < 2) throw ArgumentError("dose_response: size mismatch");
  if (!xi.allFinite() || !A.allFinite()) throw ArgumentError("dose_response: non-finite input");
  if (o.points < 2) throw ArgumentError("dose_response: need at least two grid points");
  if (!(o.lower_quantile >= 0 && o.lower_quantile < o.upper_quantile && o.upper_quantile <= 1))
    throw ArgumentError("dose_response: bad quantile range");

  DoseResponseCurve c;
  c.level = o.level;
  c.xi = xi;
  if (o.bandwidth > 0) {
    c.bandwidth = {o.bandwidth, o.kernel, NAN};
  } else {
    if (o.h_grid.empty()) throw ArgumentError("dose_response: empty bandwidth grid");
    const double s = sd(A);
    if (!(s > 0)) throw ArgumentError("dose_response: treatment has no variation");
    std::vector<double> grid;
    for (double m : o.h_grid) grid.push_back(m * s);
    c.bandwidth = cv_bandwidth(A, xi, o.kernel, grid, o.n_folds, o.seed);
  }
  std::vector<double> av(A.data(), A.data() + A.size());
  const double lo = quantile(av, o.lower_quantile), hi = quantile(av, o.upper_quantile);
  if (!(hi > lo)) throw ArgumentError("dose_response: degenerate treatment range");
  const double z = t_critical(o.level, 0);
  const SortedSmoother sm(A, xi);
  const auto g = static_cast<std::size_t>(o.points);
  c.grid.resize(g);
  c.estimate.assign(g, NAN);
  c.se.assign(g, NAN);
  c.lower.assign(g, NAN);
  c.upper.assign(g, NAN);
  for (std::size_t k = 0; k < g; ++k) {
    const double a = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(g - 1);
    c.grid[k] = a;
    const auto s = sm.sums(a, c.bandwidth);
    if (!(s.w > 0)) continue;
    const double m = s.wv / s.w;
    const double se = std::sqrt(sm.spread(a, c.bandwidth, m)) / s.w;
    c.estimate[k] = m;
    c.se[k] = se;
    c.lower[k] = m - z * se;
    c.upper[k] = m + z * se;
  }
  return c;
}

namespace {

std::size_t nearest(const std::vector<double>& grid, double a) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (std::abs(grid[k] - a) < std::abs(grid[best] - a)) best = k;
  return best;
}

}  // namespace

double ate_between(const DoseResponseCurve& curve, double a1, double a0) {
  if (curve.grid.empty()) throw ArgumentError("ate_between: empty curve");
  if (a1 == a0) throw ArgumentError("ate_between: a1 and a0 must differ");
  const auto i1 = nearest(curve.grid, a1), i0 = nearest(curve.grid, a0);
  if (i1 == i0) throw ArgumentError("ate_between: a1 and a0 snap to the same grid point");
  if (!curve.supported(i1) || !curve.supported(i0))
    throw OutOfSupportError("ate_between: grid point outside the treatment support");
  return (curve.estimate[i1] - curve.estimate[i0]) / (curve.grid[i1] - curve.grid[i0]);
}

double curve_slope(const DoseResponseCurve& curve, double a_lo, double a_hi) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < curve.grid.size(); ++k) {
    const double a = curve.grid[k];
    if (a < a_lo || a > a_hi || !curve.supported(k)) continue;
    n += 1;
    sx += a;
    sy += curve.estimate[k];
    sxx += a * a;
    sxy += a * curve.estimate[k];
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || !(den > 0)) throw EstimationError("curve_slope: fewer than two supported points");
  return (n * sxy - sx * sy) / den;
}

DrResult dr_dose_response(const Panel& panel, const DrSpec& spec, const DrOptions& o) {
  if (spec.covariates.empty()) throw ArgumentError("dr_dose_response: no covariates");
  std::vector<std::string> used{spec.outcome, spec.treatment};
  used.insert(used.end(), spec.covariates.begin(), spec.covariates.end());
  panel.require(used);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    if (spec.filter && !spec.filter(panel, i)) continue;
    bool ok = true;
    for (const auto& u : used) ok = ok && std::isfinite(panel.col(u)[i]);
    if (ok) rows.push_back(i);
  }
  const long n = static_cast<long>(rows.size());
  if (n < 20) throw EstimationError("dr_dose_response: fewer than 20 usable rows");
  const long p = static_cast<long>(spec.covariates.size());

  Eigen::VectorXd Y(n), A(n);
  Eigen::MatrixXd XA(n, p + 1);
  for (long i = 0; i < n; ++i) {
    const auto r = rows[static_cast<std::size_t>(i)];
    Y[i] = panel.col(spec.outcome)[r];
    A[i] = panel.col(spec.treatment)[r];
    for (long j = 0; j < p; ++j) XA(i, j) = panel.col(spec.covariates[static_cast<std::size_t>(j)])[r];
    XA(i, p) = A[i];
  }
  const Eigen::MatrixXd X = XA.leftCols(p);

  const ForestParams tp = o.treatment_forest ? *o.treatment_forest : treatment_forest_params(n);
  const auto density = CondDensity::fit(A, X, tp, stream_seed(o.seed, 1));
  const Forest mu = Forest::fit(XA, Y, o.outcome_forest, stream_seed(o.seed, 2));

  // Out-of-bag means stand in for cross-fitting at the training rows.
  const Eigen::VectorXd m = density.mean_model().oob_predictions();
  const Eigen::VectorXd mu_oob = mu.oob_predictions();
  const auto& kde = density.residual_density();

  // Covariate average of mu on a treatment grid, interpolated linearly.
  const int G = std::max(2, o.outcome_grid_points);
  const double a_min = A.minCoeff(), a_max = A.maxCoeff();
  std::vector<double> a_grid(static_cast<std::size_t>(G));
  for (int g = 0; g < G; ++g) a_grid[static_cast<std::size_t>(g)] = a_min + (a_max - a_min) * g / (G - 1);
  const Eigen::VectorXd mu_bar = mu.partial_dependence(XA, static_cast<int>(p), a_grid);

  Nuisances nu;
  nu.density = [&](double a, std::size_t j) { return kde(a - m[static_cast<long>(j)]); };
  nu.outcome = [&](std::size_t j, double a) {
    Eigen::VectorXd x = XA.row(static_cast<long>(j));
    x[p] = a;
    return mu.predict_row(x.data());
  };
  nu.fitted_outcome = [&](std::size_t i) { return mu_oob[static_cast<long>(i)]; };
  nu.outcome_average = [&](double a) {
    if (a_max == a_min) return mu_bar[0];
    const double pos = (a - a_min) / (a_max - a_min) * (G - 1);
    const int k = std::clamp(static_cast<int>(std::floor(pos)), 0, G - 2);
    const double f = pos - k;
    return mu_bar[k] * (1 - f) + mu_bar[k + 1] * f;
  };

  const PseudoOutcome po = pseudo_outcome(A, Y, nu, o.density_floor);
  DrResult r;
  r.curve = dose_response(po.xi, A, o.curve);
  r.n_obs = n;
  r.n_trimmed = po.n_trimmed;
  r.density_bandwidth = kde.bandwidth();
  r.treatment = A;
  return r;
}

std::pair<Panel, Panel> subsample_split(const Panel& panel, const std::string& variable) {
  const auto& v = panel.col(variable);
  std::vector<double> present;
  for (double x : v)
    if (!std::isnan(x)) present.push_back(x);
  if (present.empty()) throw ArgumentError("subsample_split: '" + variable + "' has no values");
  const auto [mn, mx] = std::minmax_element(present.begin(), present.end());
  if (*mn == *mx)
    throw ArgumentError("subsample_split: '" + variable + "' is constant, no split possible");
  const double med = quantile(present, 0.5);
  Panel low = panel.filter([&](std::size_t i) { return !std::isnan(v[i]) && v[i] <= med; });
  Panel high = panel.filter([&](std::size_t i) { return !std::isnan(v[i]) && v[i] > med; });
  if (high.rows() == 0)
    throw ArgumentError("subsample_split: every value of '" + variable + "' ties at the median");
  return {std::move(low), std::move(high)};
}

}  // namespace contestlab::est
