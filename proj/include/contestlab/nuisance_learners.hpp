#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "contestlab/errors.hpp"

namespace contestlab::ml {

// Query point with no training mass under a compact kernel.
class OutOfSupportError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct ForestParams {
  int n_trees = 500;
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 5;
  int features_per_split = 0;  // 0 = ceil(p / 3)
  bool bootstrap = true;
};

// Regression random forest of CART trees (squared-error splits).
class Forest {
 public:
  Forest() = default;

  static Forest fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ForestParams& params,
                    std::uint64_t seed);

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
  // Partial dependence: entry g is the mean over rows of X of the prediction
  // with column `feature` set to grid[g]. grid must be sorted ascending.
  Eigen::VectorXd partial_dependence(const Eigen::MatrixXd& X, int feature,
                                     const std::vector<double>& grid) const;
  double predict_row(const double* x, std::ptrdiff_t stride = 1) const;
  // Out-of-bag prediction for each training row (full-forest prediction for
  // rows that were in every bootstrap sample).
  const Eigen::VectorXd& oob_predictions() const { return oob_; }

  int n_features() const { return n_features_; }
  int n_trees() const { return static_cast<int>(trees_.size()); }
  const ForestParams& params() const { return params_; }
  // Smallest leaf size over all trees, counted in bootstrap rows.
  int min_leaf_size() const;

 private:
  struct Node {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    int count = 0;
  };
  using Tree = std::vector<Node>;

  static double predict_tree(const Tree& t, const double* x, std::ptrdiff_t stride);

  std::vector<Tree> trees_;
  Eigen::VectorXd oob_;
  ForestParams params_;
  int n_features_ = 0;

  friend struct TreeBuilder;
};

enum class Kernel { epanechnikov, gaussian };

const char* to_string(Kernel k);
Kernel kernel_from_string(const std::string& name);

// Kernel profile K(u) (unnormalized constants do not matter for smoothing).
double kernel_weight(Kernel k, double u);

struct Bandwidth {
  double h = 1.0;
  Kernel kernel = Kernel::epanechnikov;
  double cv_score = 0.0;
};

// Gaussian kernel density estimate of a sample, tabulated on a fine grid
// and evaluated by linear interpolation.
class ResidualDensity {
 public:
  ResidualDensity() = default;
  ResidualDensity(const Eigen::VectorXd& sample, double h, int table_points = 4096);

  double operator()(double u) const;
  double bandwidth() const { return h_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }

 private:
  double h_ = 1.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double step_ = 1.0;
  std::vector<double> table_;
};

// Silverman's rule of thumb, 0.9 min(sd, IQR / 1.34) n^(-1/5).
double silverman_bandwidth(const Eigen::VectorXd& sample);

// Rule-of-thumb bandwidth refined by leave-one-out log-likelihood over
// multiples of it.
double cv_density_bandwidth(const Eigen::VectorXd& sample);

// Defaults for the treatment mean model. Small leaves let the forest chase
// noise, which shifts the whole conditional density, so leaves grow with n.
ForestParams treatment_forest_params(long n_rows);

// pi(a | x) = kde(a - m(x)) with m a forest fit of A on X and the KDE over
// out-of-bag residuals.
class CondDensity {
 public:
  static CondDensity fit(const Eigen::VectorXd& A, const Eigen::MatrixXd& X,
                         const ForestParams& params, std::uint64_t seed);

  double eval(double a, const double* x, std::ptrdiff_t stride = 1) const;
  double eval_at_mean(double a, double mean) const { return density_(a - mean); }
  double mean(const double* x, std::ptrdiff_t stride = 1) const {
    return mean_model_.predict_row(x, stride);
  }
  const Forest& mean_model() const { return mean_model_; }
  const ResidualDensity& residual_density() const { return density_; }

 private:
  Forest mean_model_;
  ResidualDensity density_;
};

// Nadaraya-Watson estimate at a0. Optional observation weights multiply the
// kernel weights. Throws OutOfSupportError when all weights vanish.
double kernel_smooth(double a0, const Eigen::VectorXd& A, const Eigen::VectorXd& values,
                     const Bandwidth& bw, const Eigen::VectorXd* weights = nullptr);

// K-fold cross-validated bandwidth; ties go to the larger h. Held-out points
// without kernel support are predicted by the training-fold mean.
Bandwidth cv_bandwidth(const Eigen::VectorXd& A, const Eigen::VectorXd& values, Kernel kernel,
                       const std::vector<double>& h_grid, int n_folds, std::uint64_t seed);

// Sorted-sample smoother used by the dose-response and CV code.
class SortedSmoother {
 public:
  SortedSmoother(const Eigen::VectorXd& A, const Eigen::VectorXd& values);
  SortedSmoother(std::vector<double> a, std::vector<double> v);

  struct Sums {
    double w = 0.0;
    double wv = 0.0;
    double w2 = 0.0;
  };
  Sums sums(double a0, const Bandwidth& bw) const;
  // Sum of w_i^2 (v_i - m)^2 for the sandwich variance.
  double spread(double a0, const Bandwidth& bw, double m) const;
  double mean() const { return mean_; }
  std::size_t size() const { return a_.size(); }

 private:
  std::pair<std::size_t, std::size_t> window(double a0, const Bandwidth& bw) const;
  std::vector<double> a_;
  std::vector<double> v_;
  double mean_ = 0.0;
};

}  // namespace contestlab::ml
