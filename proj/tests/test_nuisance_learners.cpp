#include <cmath>

#include "contestlab/nuisance_learners.hpp"
#include "contestlab/parallel.hpp"
#include "contestlab/rng.hpp"
#include "doctest.h"

using namespace contestlab;
using namespace contestlab::ml;

namespace {

Eigen::MatrixXd normal_matrix(long n, long p, Rng& rng) {
  Eigen::MatrixXd X(n, p);
  for (long j = 0; j < p; ++j)
    for (long i = 0; i < n; ++i) X(i, j) = rng.normal();
  return X;
}

double variance(const Eigen::VectorXd& v) { return (v.array() - v.mean()).square().mean(); }

ForestParams small_forest() {
  ForestParams p;
  p.n_trees = 100;
  return p;
}

}  // namespace

TEST_CASE("forest constant response") {
  Rng rng(1);
  const Eigen::MatrixXd X = normal_matrix(200, 3, rng);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(200, 5.0);
  const auto f = Forest::fit(X, y, small_forest(), 11);
  const Eigen::VectorXd pred = f.predict(X);
  for (long i = 0; i < pred.size(); ++i) CHECK(pred[i] == doctest::Approx(5.0));
  CHECK(f.oob_predictions().size() == 200);
}

TEST_CASE("forest recovers a step function") {
  Rng rng(2);
  const long n = 1000;
  const Eigen::MatrixXd X = normal_matrix(n, 2, rng);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) y[i] = X(i, 0) > 0.3 ? 4.0 : 1.0;
  ForestParams p = small_forest();
  p.max_depth = 1;
  p.features_per_split = 2;
  const auto f = Forest::fit(X, y, p, 5);
  const double mse = (f.predict(X) - y).array().square().mean();
  CHECK(mse < 0.25 * variance(y));
}

TEST_CASE("forest linear signal, held-out R^2") {
  Rng rng(3);
  const long n = 2000;
  Eigen::MatrixXd X = normal_matrix(2 * n, 3, rng);
  Eigen::VectorXd y(2 * n);
  for (long i = 0; i < 2 * n; ++i) y[i] = 3.0 * X(i, 0) + rng.normal(0.0, 0.1);
  const Eigen::MatrixXd Xtr = X.topRows(n), Xte = X.bottomRows(n);
  const Eigen::VectorXd ytr = y.head(n), yte = y.tail(n);
  ForestParams p = small_forest();
  p.features_per_split = 3;
  const auto f = Forest::fit(Xtr, ytr, p, 9);
  const Eigen::VectorXd pred = f.predict(Xte);
  const double r2 = 1.0 - (pred - yte).array().square().mean() / variance(yte);
  CHECK(r2 > 0.9);

  // Predictions stay inside the training range; leaves respect min_leaf.
  CHECK(pred.minCoeff() >= ytr.minCoeff());
  CHECK(pred.maxCoeff() <= ytr.maxCoeff());
  CHECK(f.min_leaf_size() >= p.min_leaf);
  CHECK_THROWS_AS(f.predict(Xte.leftCols(2)), ArgumentError);
}

TEST_CASE("forest input validation") {
  Eigen::MatrixXd X(0, 2);
  Eigen::VectorXd y(0);
  CHECK_THROWS_AS(Forest::fit(X, y, {}, 1), ArgumentError);
  Eigen::MatrixXd X2 = Eigen::MatrixXd::Zero(20, 2);
  Eigen::VectorXd y2 = Eigen::VectorXd::LinSpaced(20, 0, 1);
  // Constant X with varying y predicts the mean.
  const auto f = Forest::fit(X2, y2, small_forest(), 1);
  CHECK(f.predict(X2)[0] == doctest::Approx(0.5).epsilon(0.05));
  X2(3, 1) = NAN;
  CHECK_THROWS_AS(Forest::fit(X2, y2, {}, 1), ArgumentError);
}

TEST_CASE("forest deterministic and thread independent") {
  Rng rng(4);
  const Eigen::MatrixXd X = normal_matrix(500, 4, rng);
  Eigen::VectorXd y(500);
  for (long i = 0; i < 500; ++i) y[i] = X(i, 1) * X(i, 2) + rng.normal();
  set_threads(1);
  const auto a = Forest::fit(X, y, small_forest(), 21);
  set_threads(4);
  const auto b = Forest::fit(X, y, small_forest(), 21);
  set_threads(0);
  CHECK((a.predict(X) - b.predict(X)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.oob_predictions() - b.oob_predictions()).cwiseAbs().maxCoeff() == 0.0);
  const auto c = Forest::fit(X, y, small_forest(), 22);
  CHECK((a.predict(X) - c.predict(X)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("conditional density, independent normal treatment") {
  Rng rng(5);
  const long n = 5000;
  const Eigen::MatrixXd X = normal_matrix(n, 2, rng);
  Eigen::VectorXd A(n);
  for (long i = 0; i < n; ++i) A[i] = rng.normal();
  const auto cd = CondDensity::fit(A, X, treatment_forest_params(n), 3);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Vector2d x(rng.normal(), rng.normal());
    CHECK(std::abs(cd.eval(0.0, x.data()) - 0.3989) < 0.03);
  }
}

TEST_CASE("conditional density, uniform noise band") {
  Rng rng(6);
  const long n = 4000;
  const Eigen::MatrixXd X = normal_matrix(n, 1, rng);
  Eigen::VectorXd A(n);
  for (long i = 0; i < n; ++i) A[i] = X(i, 0) + rng.uniform(-0.5, 0.5);
  const auto cd = CondDensity::fit(A, X, treatment_forest_params(n), 3);
  for (double x : {-1.0, -0.3, 0.0, 0.4, 1.0}) {
    // Centre of the band, away from the smoothed edges.
    for (double u : {-0.15, 0.0, 0.15}) CHECK(std::abs(cd.eval(x + u, &x) - 1.0) < 0.1);
  }
}

TEST_CASE("conditional density, deterministic treatment is degenerate") {
  Rng rng(7);
  const Eigen::MatrixXd X = Eigen::VectorXd::LinSpaced(200, 0, 1);
  const Eigen::VectorXd A = X.col(0);
  ForestParams p = small_forest();
  p.bootstrap = false;
  p.min_leaf = 1;
  CHECK_THROWS_AS(CondDensity::fit(A, X, p, 1), DomainError);
}

TEST_CASE("conditional density integrates to one") {
  Rng rng(8);
  const long n = 1500;
  const Eigen::MatrixXd X = normal_matrix(n, 2, rng);
  Eigen::VectorXd A(n);
  for (long i = 0; i < n; ++i) A[i] = 0.8 * X(i, 0) + rng.normal(0.0, 0.5) * (1 + (i % 3 == 0));
  const auto cd = CondDensity::fit(A, X, small_forest(), 3);
  const auto& dens = cd.residual_density();
  for (int k = 0; k < 20; ++k) {
    const Eigen::Vector2d x(rng.normal(), rng.normal());
    const double m = cd.mean(x.data());
    const double lo = m + dens.lower(), hi = m + dens.upper();
    const int steps = 20000;
    const double dx = (hi - lo) / steps;
    double total = 0.0;
    for (int s = 0; s <= steps; ++s) {
      const double w = (s == 0 || s == steps) ? 0.5 : 1.0;
      const double v = cd.eval(lo + s * dx, x.data());
      CHECK(v >= 0.0);
      total += w * v * dx;
    }
    CHECK(std::abs(total - 1.0) < 1e-3);
  }
}

TEST_CASE("silverman bandwidth") {
  Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(101, -1, 1);
  CHECK(silverman_bandwidth(s) > 0);
  CHECK_THROWS_AS(silverman_bandwidth(Eigen::VectorXd::Constant(50, 2.0)), DomainError);
}

TEST_CASE("kernel_smooth basic cases") {
  Rng rng(9);
  const long n = 2000;
  Eigen::VectorXd A = Eigen::VectorXd::LinSpaced(n, 0, 10);
  Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 3.5);
  for (double a0 : {0.0, 2.7, 9.9})
    CHECK(kernel_smooth(a0, A, c, {0.5, Kernel::epanechnikov, 0}) == doctest::Approx(3.5));

  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = rng.normal();
  CHECK(kernel_smooth(4.0, A, v, {1e9, Kernel::gaussian, 0}) == doctest::Approx(v.mean()));
  CHECK(kernel_smooth(4.0, A, v, {1e9, Kernel::epanechnikov, 0}) == doctest::Approx(v.mean()));

  const double h = 0.1;
  for (double a0 : {0.05, 3.33, 7.0, 9.95})
    CHECK(std::abs(kernel_smooth(a0, A, A, {h, Kernel::epanechnikov, 0}) - a0) <= h);

  // Rescaling all observation weights leaves the estimate unchanged.
  Eigen::VectorXd w(n);
  for (long i = 0; i < n; ++i) w[i] = 0.5 + rng.uniform();
  const Eigen::VectorXd w3 = 3.0 * w;
  CHECK(kernel_smooth(5.0, A, v, {0.7, Kernel::gaussian, 0}, &w) ==
        doctest::Approx(kernel_smooth(5.0, A, v, {0.7, Kernel::gaussian, 0}, &w3)));

  CHECK_THROWS_AS(kernel_smooth(50.0, A, v, {0.5, Kernel::epanechnikov, 0}), OutOfSupportError);
  CHECK_NOTHROW(kernel_smooth(12.0, A, v, {0.5, Kernel::gaussian, 0}));
}

TEST_CASE("sorted smoother matches the direct estimate") {
  Rng rng(10);
  const long n = 500;
  Eigen::VectorXd A(n), v(n);
  for (long i = 0; i < n; ++i) {
    A[i] = rng.normal();
    v[i] = A[i] * A[i] + rng.normal();
  }
  const SortedSmoother sm(A, v);
  for (Kernel k : {Kernel::epanechnikov, Kernel::gaussian}) {
    const Bandwidth bw{0.3, k, 0};
    for (double a0 : {-1.0, 0.0, 0.8}) {
      const auto s = sm.sums(a0, bw);
      CHECK(s.wv / s.w == doctest::Approx(kernel_smooth(a0, A, v, bw)).epsilon(1e-9));
    }
  }
}

TEST_CASE("cv_bandwidth selection") {
  Rng rng(11);
  const long n = 1500;
  const std::vector<double> grid{0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64};
  const double median_h = 0.08;
  Eigen::VectorXd A(n);
  for (long i = 0; i < n; ++i) A[i] = rng.uniform(0, 1);

  const Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 1.0);
  CHECK(cv_bandwidth(A, c, Kernel::epanechnikov, grid, 5, 1).h == 0.64);

  Eigen::VectorXd wiggly(n), smooth(n);
  for (long i = 0; i < n; ++i) {
    wiggly[i] = std::sin(10 * A[i]) + rng.normal(0.0, 0.1);
    smooth[i] = 2.0 * A[i] + rng.normal(0.0, 3.0);
  }
  const auto bw_w = cv_bandwidth(A, wiggly, Kernel::epanechnikov, grid, 5, 2);
  CHECK(bw_w.h < median_h);
  CHECK(bw_w.cv_score > 0);
  CHECK(cv_bandwidth(A, smooth, Kernel::epanechnikov, grid, 5, 3).h > median_h);

  CHECK_THROWS_AS(cv_bandwidth(A, c, Kernel::gaussian, {}, 5, 1), ArgumentError);
  CHECK_THROWS_AS(cv_bandwidth(A, c, Kernel::gaussian, grid, 1, 1), ArgumentError);

  CHECK(kernel_from_string("gaussian") == Kernel::gaussian);
  CHECK(std::string(to_string(Kernel::epanechnikov)) == "epanechnikov");
  CHECK_THROWS_AS(kernel_from_string("box"), ArgumentError);
}
