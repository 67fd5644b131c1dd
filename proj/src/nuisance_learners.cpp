#include "contestlab/nuisance_learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contestlab/parallel.hpp"
#include "contestlab/rng.hpp"

namespace contestlab::ml {

// ---------------------------------------------------------------- forest

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  const ForestParams& params;
  int mtry;
  // Row ids sorted by each feature, computed once per forest.
  std::vector<std::vector<int>> sorted;

  // Bootstrap copies enter as integer weights on distinct rows. Each node
  // owns the same [begin, end) segment of every per-feature order, and
  // splits stable-partition all of them, so no per-node sorting is needed.
  Forest::Tree build(const std::vector<int>& weight, Rng& rng) const {
    const int p = static_cast<int>(X.cols());
    std::vector<std::vector<int>> order(static_cast<std::size_t>(p));
    for (int f = 0; f < p; ++f) {
      auto& o = order[static_cast<std::size_t>(f)];
      for (int r : sorted[static_cast<std::size_t>(f)])
        if (weight[static_cast<std::size_t>(r)] > 0) o.push_back(r);
    }
    const std::size_t m = order[0].size();
    std::vector<char> go_left(weight.size(), 0);
    std::vector<int> buf(m);

    Forest::Tree tree;
    struct Task {
      int node;
      std::size_t begin, end;
      int depth;
    };
    std::vector<Task> stack{{0, 0, m, 0}};
    tree.emplace_back();
    std::vector<int> features(static_cast<std::size_t>(p));
    std::iota(features.begin(), features.end(), 0);
    const double min_leaf = params.min_leaf;
    while (!stack.empty()) {
      const Task t = stack.back();
      stack.pop_back();
      const auto& base = order[0];
      double w_total = 0.0, sum = 0.0;
      for (std::size_t k = t.begin; k < t.end; ++k) {
        const int r = base[k];
        const double w = weight[static_cast<std::size_t>(r)];
        w_total += w;
        sum += w * y[r];
      }
      auto& node = tree[static_cast<std::size_t>(t.node)];
      node.value = sum / w_total;
      node.count = static_cast<int>(w_total);
      const bool depth_ok = params.max_depth <= 0 || t.depth < params.max_depth;
      if (!depth_ok || w_total < 2 * min_leaf || t.end - t.begin < 2) continue;

      for (int k = 0; k < mtry; ++k) {
        const std::size_t j = static_cast<std::size_t>(k) + rng.index(features.size() - k);
        std::swap(features[static_cast<std::size_t>(k)], features[j]);
      }
      const double parent = sum * sum / w_total;
      double best_gain = 1e-12 * std::max(1.0, std::abs(parent));
      int best_feature = -1;
      double best_threshold = 0.0;
      for (int k = 0; k < mtry; ++k) {
        const int f = features[static_cast<std::size_t>(k)];
        const auto& o = order[static_cast<std::size_t>(f)];
        if (X(o[t.begin], f) == X(o[t.end - 1], f)) continue;
        double wl = 0.0, sl = 0.0;
        for (std::size_t q = t.begin; q + 1 < t.end; ++q) {
          const int r = o[q];
          const double w = weight[static_cast<std::size_t>(r)];
          wl += w;
          sl += w * y[r];
          if (wl < min_leaf) continue;
          if (w_total - wl < min_leaf) break;
          const double x0 = X(r, f), x1 = X(o[q + 1], f);
          if (x0 == x1) continue;
          const double sr = sum - sl;
          const double gain = sl * sl / wl + sr * sr / (w_total - wl) - parent;
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = f;
            best_threshold = 0.5 * (x0 + x1);
            // Guard against midpoints rounding onto the upper value.
            if (!(best_threshold < x1)) best_threshold = x0;
          }
        }
      }
      if (best_feature < 0) continue;

      std::size_t n_left = 0;
      for (std::size_t q = t.begin; q < t.end; ++q) {
        const int r = base[q];
        const bool left = X(r, best_feature) <= best_threshold;
        go_left[static_cast<std::size_t>(r)] = left;
        n_left += left;
      }
      for (auto& o : order) {
        std::size_t li = t.begin, ri = 0;
        for (std::size_t q = t.begin; q < t.end; ++q) {
          const int r = o[q];
          if (go_left[static_cast<std::size_t>(r)]) o[li++] = r;
          else buf[ri++] = r;
        }
        std::copy(buf.begin(), buf.begin() + static_cast<long>(ri), o.begin() + static_cast<long>(li));
      }
      const std::size_t split = t.begin + n_left;
      const int left_id = static_cast<int>(tree.size());
      tree.emplace_back();
      tree.emplace_back();
      auto& parent_node = tree[static_cast<std::size_t>(t.node)];
      parent_node.feature = best_feature;
      parent_node.threshold = best_threshold;
      parent_node.left = left_id;
      parent_node.right = left_id + 1;
      stack.push_back({left_id + 1, split, t.end, t.depth + 1});
      stack.push_back({left_id, t.begin, split, t.depth + 1});
    }
    return tree;
  }
};

Forest Forest::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ForestParams& params,
                   std::uint64_t seed) {
  const auto n = X.rows();
  if (n == 0 || X.cols() == 0) throw ArgumentError("forest: empty data");
  if (y.size() != n) throw ArgumentError("forest: X and y row counts differ");
  if (params.n_trees < 1 || params.min_leaf < 1) throw ArgumentError("forest: bad hyperparameters");
  if (n < 2 * params.min_leaf) throw ArgumentError("forest: fewer than 2 * min_leaf rows");
  if (!X.allFinite() || !y.allFinite()) throw ArgumentError("forest: non-finite input");

  Forest forest;
  forest.params_ = params;
  forest.n_features_ = static_cast<int>(X.cols());
  const int p = static_cast<int>(X.cols());
  int mtry = params.features_per_split > 0 ? params.features_per_split : (p + 2) / 3;
  mtry = std::clamp(mtry, 1, p);
  TreeBuilder builder{X, y, params, mtry, {}};
  builder.sorted.resize(static_cast<std::size_t>(p));
  for (int f = 0; f < p; ++f) {
    auto& o = builder.sorted[static_cast<std::size_t>(f)];
    o.resize(static_cast<std::size_t>(n));
    std::iota(o.begin(), o.end(), 0);
    std::stable_sort(o.begin(), o.end(), [&](int a, int b) { return X(a, f) < X(b, f); });
  }

  const auto n_trees = static_cast<std::size_t>(params.n_trees);
  forest.trees_.resize(n_trees);
  std::vector<std::vector<std::uint8_t>> in_bag(n_trees);
  parallel_for(n_trees, [&](std::size_t t) {
    Rng rng(seed, t);
    std::vector<int> weight(static_cast<std::size_t>(n), 0);
    if (params.bootstrap) {
      for (long k = 0; k < n; ++k) ++weight[rng.index(static_cast<std::size_t>(n))];
    } else {
      std::fill(weight.begin(), weight.end(), 1);
    }
    auto& bag = in_bag[t];
    bag.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < bag.size(); ++i) bag[i] = weight[i] > 0;
    forest.trees_[t] = builder.build(weight, rng);
  });

  forest.oob_.resize(n);
  const Eigen::MatrixXd Xt = X.transpose();
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const double* x = Xt.data() + static_cast<long>(i) * p;
    double sum = 0.0, all = 0.0;
    int count = 0;
    for (std::size_t t = 0; t < n_trees; ++t) {
      const double v = predict_tree(forest.trees_[t], x, 1);
      all += v;
      if (!in_bag[t][i]) {
        sum += v;
        ++count;
      }
    }
    forest.oob_[static_cast<long>(i)] = count > 0 ? sum / count : all / static_cast<double>(n_trees);
  });
  return forest;
}

double Forest::predict_tree(const Tree& t, const double* x, std::ptrdiff_t stride) {
  int node = 0;
  for (;;) {
    const Node& nd = t[static_cast<std::size_t>(node)];
    if (nd.feature < 0) return nd.value;
    // Children are adjacent (right = left + 1).
    node = nd.left + static_cast<int>(x[nd.feature * stride] > nd.threshold);
  }
}

double Forest::predict_row(const double* x, std::ptrdiff_t stride) const {
  if (trees_.empty()) throw ArgumentError("forest: not fitted");
  double sum = 0.0;
  for (const auto& t : trees_) sum += predict_tree(t, x, stride);
  return sum / static_cast<double>(trees_.size());
}

Eigen::VectorXd Forest::predict(const Eigen::MatrixXd& X) const {
  if (X.cols() != n_features_) throw ArgumentError("forest: column count differs from training");
  if (trees_.empty()) throw ArgumentError("forest: not fitted");
  // Row-major copy keeps each row's features on one cache line; trees are
  // walked in blocks so their nodes stay cached across rows.
  const Eigen::MatrixXd Xt = X.transpose();
  const long n = X.rows(), p = X.cols();
  constexpr long kBlock = 256;
  const auto n_blocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  parallel_for(n_blocks, [&](std::size_t b) {
    const long lo = static_cast<long>(b) * kBlock, hi = std::min(n, lo + kBlock);
    for (const auto& t : trees_)
      for (long i = lo; i < hi; ++i) out[i] += predict_tree(t, Xt.data() + i * p, 1);
  });
  out /= static_cast<double>(trees_.size());
  return out;
}

Eigen::VectorXd Forest::partial_dependence(const Eigen::MatrixXd& X, int feature,
                                           const std::vector<double>& grid) const {
  if (trees_.empty()) throw ArgumentError("forest: not fitted");
  if (X.cols() != n_features_) throw ArgumentError("forest: column count differs from training");
  if (feature < 0 || feature >= n_features_) throw ArgumentError("forest: feature out of range");
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()))
    throw ArgumentError("forest: grid must be non-empty and sorted");
  const Eigen::MatrixXd Xt = X.transpose();
  const long n = X.rows(), p = X.cols();
  const std::size_t G = grid.size();
  constexpr long kBlock = 256;
  const auto n_blocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
  // Difference arrays per block; leaves add their value over the grid index
  // range that reaches them. Blocks are summed in order for determinism.
  std::vector<std::vector<double>> diff(n_blocks, std::vector<double>(G + 1, 0.0));
  parallel_for(n_blocks, [&](std::size_t b) {
    auto& d = diff[b];
    struct Item {
      int node;
      std::size_t lo, hi;
    };
    std::vector<Item> stack;
    const long lo_row = static_cast<long>(b) * kBlock, hi_row = std::min(n, lo_row + kBlock);
    for (const auto& t : trees_)
      for (long i = lo_row; i < hi_row; ++i) {
        const double* x = Xt.data() + i * p;
        stack.push_back({0, 0, G});
        while (!stack.empty()) {
          const Item it = stack.back();
          stack.pop_back();
          const Node& nd = t[static_cast<std::size_t>(it.node)];
          if (nd.feature < 0) {
            d[it.lo] += nd.value;
            d[it.hi] -= nd.value;
          } else if (nd.feature != feature) {
            stack.push_back({x[nd.feature] <= nd.threshold ? nd.left : nd.right, it.lo, it.hi});
          } else {
            const auto cut = static_cast<std::size_t>(
                std::upper_bound(grid.begin() + static_cast<long>(it.lo),
                                 grid.begin() + static_cast<long>(it.hi), nd.threshold) -
                grid.begin());
            if (cut > it.lo) stack.push_back({nd.left, it.lo, cut});
            if (cut < it.hi) stack.push_back({nd.right, cut, it.hi});
          }
        }
      }
  });
  std::vector<double> total(G + 1, 0.0);
  for (const auto& d : diff)
    for (std::size_t g = 0; g <= G; ++g) total[g] += d[g];
  Eigen::VectorXd out(static_cast<long>(G));
  double run = 0.0;
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(trees_.size()));
  for (std::size_t g = 0; g < G; ++g) {
    run += total[g];
    out[static_cast<long>(g)] = run * scale;
  }
  return out;
}

int Forest::min_leaf_size() const {
  int m = std::numeric_limits<int>::max();
  for (const auto& t : trees_)
    for (const auto& nd : t)
      if (nd.feature < 0) m = std::min(m, nd.count);
  return m;
}

// ---------------------------------------------------------------- kernels

const char* to_string(Kernel k) {
  return k == Kernel::epanechnikov ? "epanechnikov" : "gaussian";
}

Kernel kernel_from_string(const std::string& name) {
  if (name == "epanechnikov") return Kernel::epanechnikov;
  if (name == "gaussian") return Kernel::gaussian;
  throw ArgumentError("unknown kernel '" + name + "'");
}

double kernel_weight(Kernel k, double u) {
  if (k == Kernel::epanechnikov) return std::abs(u) < 1.0 ? 1.0 - u * u : 0.0;
  return std::exp(-0.5 * u * u);
}

namespace {

constexpr double kGaussianReach = 6.0;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double reach(Kernel k) { return k == Kernel::epanechnikov ? 1.0 : kGaussianReach; }

double sample_sd(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / std::max<double>(1.0, v.size() - 1.0));
}

double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace

// ---------------------------------------------------------------- densities

ResidualDensity::ResidualDensity(const Eigen::VectorXd& sample, double h, int table_points) {
  if (sample.size() == 0) throw ArgumentError("density: empty sample");
  if (!(h > 0)) throw ArgumentError("density: bandwidth must be positive");
  h_ = h;
  lo_ = sample.minCoeff() - kGaussianReach * h;
  hi_ = sample.maxCoeff() + kGaussianReach * h;
  const int G = std::max(table_points, 16);
  step_ = (hi_ - lo_) / (G - 1);
  // Linear binning onto the grid, then a discrete Gaussian convolution.
  std::vector<double> counts(static_cast<std::size_t>(G), 0.0);
  for (double v : sample) {
    const double pos = (v - lo_) / step_;
    const int i = std::clamp(static_cast<int>(std::floor(pos)), 0, G - 2);
    const double frac = pos - i;
    counts[static_cast<std::size_t>(i)] += 1.0 - frac;
    counts[static_cast<std::size_t>(i + 1)] += frac;
  }
  const int width = static_cast<int>(std::ceil(kGaussianReach * h / step_));
  std::vector<double> kern(static_cast<std::size_t>(width + 1));
  for (int d = 0; d <= width; ++d) {
    const double u = d * step_ / h;
    kern[static_cast<std::size_t>(d)] = kInvSqrt2Pi * std::exp(-0.5 * u * u) / h;
  }
  table_.assign(static_cast<std::size_t>(G), 0.0);
  const double n = static_cast<double>(sample.size());
  for (int i = 0; i < G; ++i) {
    const double c = counts[static_cast<std::size_t>(i)];
    if (c == 0.0) continue;
    const int a = std::max(0, i - width), b = std::min(G - 1, i + width);
    for (int g = a; g <= b; ++g)
      table_[static_cast<std::size_t>(g)] += c * kern[static_cast<std::size_t>(std::abs(g - i))];
  }
  for (auto& v : table_) v /= n;
}

double ResidualDensity::operator()(double u) const {
  if (table_.empty()) throw ArgumentError("density: not fitted");
  if (!(u > lo_ && u < hi_)) return 0.0;
  const double pos = (u - lo_) / step_;
  const auto i = std::min(static_cast<std::size_t>(pos), table_.size() - 2);
  const double frac = pos - static_cast<double>(i);
  return table_[i] * (1.0 - frac) + table_[i + 1] * frac;
}

double silverman_bandwidth(const Eigen::VectorXd& sample) {
  const auto n = sample.size();
  if (n < 2) throw ArgumentError("bandwidth: need at least two points");
  const double sd = sample_sd(sample);
  std::vector<double> s(sample.data(), sample.data() + n);
  std::sort(s.begin(), s.end());
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0)) spread = sd;
  const double scale = std::max(1.0, std::max(std::abs(s.front()), std::abs(s.back())));
  if (!(spread > 1e-12 * scale)) throw DomainError("degenerate density: zero-variance sample");
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

double cv_density_bandwidth(const Eigen::VectorXd& sample) {
  const double h0 = silverman_bandwidth(sample);
  const double n = static_cast<double>(sample.size());
  double best_h = h0, best_ll = -INFINITY;
  for (int k = -8; k <= 4; ++k) {
    const double h = h0 * std::pow(2.0, k / 4.0);
    ResidualDensity f(sample, h, 2048);
    double ll = 0.0;
    for (double v : sample) {
      const double loo = (n * f(v) - kInvSqrt2Pi / h) / (n - 1.0);
      ll += std::log(std::max(loo, 1e-300));
    }
    if (ll > best_ll) {
      best_ll = ll;
      best_h = h;
    }
  }
  return best_h;
}

ForestParams treatment_forest_params(long n_rows) {
  ForestParams p;
  p.min_leaf = static_cast<int>(std::max(5L, n_rows / 25));
  return p;
}

CondDensity CondDensity::fit(const Eigen::VectorXd& A, const Eigen::MatrixXd& X,
                             const ForestParams& params, std::uint64_t seed) {
  CondDensity cd;
  cd.mean_model_ = Forest::fit(X, A, params, seed);
  const Eigen::VectorXd resid = A - cd.mean_model_.oob_predictions();
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (!(sample_sd(resid) > 1e-10 * scale))
    throw DomainError("degenerate density: treatment residuals have zero variance");
  cd.density_ = ResidualDensity(resid, cv_density_bandwidth(resid));
  return cd;
}

double CondDensity::eval(double a, const double* x, std::ptrdiff_t stride) const {
  return density_(a - mean_model_.predict_row(x, stride));
}

// ---------------------------------------------------------------- smoothing

double kernel_smooth(double a0, const Eigen::VectorXd& A, const Eigen::VectorXd& values,
                     const Bandwidth& bw, const Eigen::VectorXd* weights) {
  if (A.size() != values.size() || A.size() == 0)
    throw ArgumentError("kernel_smooth: size mismatch or empty data");
  if (weights && weights->size() != A.size()) throw ArgumentError("kernel_smooth: weight size");
  if (!(bw.h > 0)) throw ArgumentError("kernel_smooth: bandwidth must be positive");
  double sw = 0.0, swv = 0.0;
  for (long i = 0; i < A.size(); ++i) {
    double w = kernel_weight(bw.kernel, (A[i] - a0) / bw.h);
    if (weights) w *= (*weights)[i];
    sw += w;
    swv += w * values[i];
  }
  if (!(sw > 0)) throw OutOfSupportError("kernel_smooth: no training mass near query point");
  return swv / sw;
}

SortedSmoother::SortedSmoother(const Eigen::VectorXd& A, const Eigen::VectorXd& values)
    : SortedSmoother(std::vector<double>(A.data(), A.data() + A.size()),
                     std::vector<double>(values.data(), values.data() + values.size())) {}

SortedSmoother::SortedSmoother(std::vector<double> a, std::vector<double> v) {
  if (a.size() != v.size() || a.empty()) throw ArgumentError("smoother: size mismatch or empty");
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return a[i] < a[j]; });
  a_.resize(a.size());
  v_.resize(v.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    a_[k] = a[idx[k]];
    v_[k] = v[idx[k]];
  }
  mean_ = std::accumulate(v_.begin(), v_.end(), 0.0) / static_cast<double>(v_.size());
}

std::pair<std::size_t, std::size_t> SortedSmoother::window(double a0, const Bandwidth& bw) const {
  const double r = reach(bw.kernel) * bw.h;
  const auto lo = std::lower_bound(a_.begin(), a_.end(), a0 - r) - a_.begin();
  const auto hi = std::upper_bound(a_.begin(), a_.end(), a0 + r) - a_.begin();
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

SortedSmoother::Sums SortedSmoother::sums(double a0, const Bandwidth& bw) const {
  Sums s;
  const auto [lo, hi] = window(a0, bw);
  for (std::size_t i = lo; i < hi; ++i) {
    const double w = kernel_weight(bw.kernel, (a_[i] - a0) / bw.h);
    s.w += w;
    s.wv += w * v_[i];
    s.w2 += w * w;
  }
  return s;
}

double SortedSmoother::spread(double a0, const Bandwidth& bw, double m) const {
  double s = 0.0;
  const auto [lo, hi] = window(a0, bw);
  for (std::size_t i = lo; i < hi; ++i) {
    const double w = kernel_weight(bw.kernel, (a_[i] - a0) / bw.h);
    s += w * w * (v_[i] - m) * (v_[i] - m);
  }
  return s;
}

Bandwidth cv_bandwidth(const Eigen::VectorXd& A, const Eigen::VectorXd& values, Kernel kernel,
                       const std::vector<double>& h_grid, int n_folds, std::uint64_t seed) {
  if (h_grid.empty()) throw ArgumentError("cv_bandwidth: empty bandwidth grid");
  if (n_folds < 2) throw ArgumentError("cv_bandwidth: need at least two folds");
  const auto n = static_cast<std::size_t>(A.size());
  if (n < static_cast<std::size_t>(n_folds) || values.size() != A.size())
    throw ArgumentError("cv_bandwidth: too few points or size mismatch");
  for (double h : h_grid)
    if (!(h > 0)) throw ArgumentError("cv_bandwidth: bandwidths must be positive");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed, 0xcf01dULL);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<int> fold(n);
  for (std::size_t k = 0; k < n; ++k) fold[perm[k]] = static_cast<int>(k % n_folds);

  std::vector<SortedSmoother> train;
  std::vector<std::vector<std::size_t>> held(static_cast<std::size_t>(n_folds));
  for (int f = 0; f < n_folds; ++f) {
    std::vector<double> a, v;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold[i] == f) {
        held[static_cast<std::size_t>(f)].push_back(i);
      } else {
        a.push_back(A[static_cast<long>(i)]);
        v.push_back(values[static_cast<long>(i)]);
      }
    }
    train.emplace_back(std::move(a), std::move(v));
  }

  std::vector<double> grid = h_grid;
  std::sort(grid.begin(), grid.end());
  std::vector<double> scores(grid.size());
  parallel_for(grid.size(), [&](std::size_t g) {
    const Bandwidth bw{grid[g], kernel, 0.0};
    double sse = 0.0;
    for (int f = 0; f < n_folds; ++f) {
      const auto& sm = train[static_cast<std::size_t>(f)];
      for (std::size_t i : held[static_cast<std::size_t>(f)]) {
        const auto s = sm.sums(A[static_cast<long>(i)], bw);
        const double pred = s.w > 0 ? s.wv / s.w : sm.mean();
        const double e = values[static_cast<long>(i)] - pred;
        sse += e * e;
      }
    }
    scores[g] = sse / static_cast<double>(n);
  });
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double tol = 1e-12 * std::max(1.0, std::abs(scores[best]));
    if (scores[g] <= scores[best] + tol) best = g;
  }
  return {grid[best], kernel, scores[best]};
}

}  // namespace contestlab::ml
