#include "cfe/lof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cfe/errors.hpp"

namespace cfe {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

Eigen::VectorXd flatten_row_major(const SeriesSample& sample) {
  const int steps = sample.time_steps();
  const int width = sample.feature_count();
  Eigen::VectorXd flat(steps * width);
  for (int k = 0; k < steps; ++k) {
    for (int d = 0; d < width; ++d) {
      flat[k * width + d] = sample.values(k, d);
    }
  }
  return flat;
}

}  // namespace

LofDetector::LofDetector(const std::vector<SeriesSample>& references, int n_neighbors,
                         double threshold)
    : n_neighbors_(n_neighbors), threshold_(threshold) {
  if (n_neighbors_ < 1) {
    throw ConfigError("lof n_neighbors must be at least 1");
  }
  if (static_cast<int>(references.size()) < n_neighbors_ + 1) {
    throw StateError("lof detector needs at least n_neighbors + 1 reference samples");
  }
  rows_ = references.front().time_steps();
  cols_ = references.front().feature_count();
  const int n = static_cast<int>(references.size());
  reference_matrix_.resize(n, rows_ * cols_);
  for (int i = 0; i < n; ++i) {
    require_same_shape(references[static_cast<size_t>(i)], references.front());
    reference_matrix_.row(i) = flatten_row_major(references[static_cast<size_t>(i)]);
  }

  Eigen::MatrixXd pairwise(n, n);
  for (int i = 0; i < n; ++i) {
    pairwise.row(i) =
        (reference_matrix_.rowwise() - reference_matrix_.row(i)).rowwise().norm();
  }

  k_distance_.resize(n);
  std::vector<std::vector<int>> neighborhoods(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> order = nearest(pairwise.row(i), n_neighbors_, i);
    k_distance_[i] = pairwise(i, order.back());
    neighborhoods[static_cast<size_t>(i)] = std::move(order);
  }

  lrd_.resize(n);
  for (int i = 0; i < n; ++i) {
    double reach_sum = 0.0;
    for (int o : neighborhoods[static_cast<size_t>(i)]) {
      reach_sum += std::max(k_distance_[o], pairwise(i, o));
    }
    lrd_[i] = reach_sum > 0.0 ? n_neighbors_ / reach_sum : kInfinity;
  }
}

std::vector<int> LofDetector::nearest(const Eigen::VectorXd& dists, int count,
                                      int skip_index) const {
  std::vector<int> order(static_cast<size_t>(dists.size()));
  std::iota(order.begin(), order.end(), 0);
  if (skip_index >= 0) {
    order.erase(order.begin() + skip_index);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return dists[a] < dists[b]; });
  order.resize(static_cast<size_t>(count));
  return order;
}

double LofDetector::score(const SeriesSample& sample) const {
  if (sample.time_steps() != rows_ || sample.feature_count() != cols_) {
    throw DimensionError("lof query shape does not match reference shape");
  }
  const Eigen::VectorXd query = flatten_row_major(sample);
  const Eigen::VectorXd dists =
      (reference_matrix_.rowwise() - query.transpose()).rowwise().norm();

  const std::vector<int> order = nearest(dists, n_neighbors_, -1);
  double reach_sum = 0.0;
  double neighbor_lrd_sum = 0.0;
  for (int o : order) {
    reach_sum += std::max(k_distance_[o], dists[o]);
    neighbor_lrd_sum += lrd_[o];
  }
  const double lrd_query = reach_sum > 0.0 ? n_neighbors_ / reach_sum : kInfinity;
  const double mean_neighbor_lrd = neighbor_lrd_sum / n_neighbors_;
  if (std::isinf(lrd_query)) {
    // Query sits on top of a zero-spread neighborhood; by the density-ratio
    // reading it is maximally in-distribution.
    return std::isinf(mean_neighbor_lrd) ? 1.0 : 0.0;
  }
  return mean_neighbor_lrd / lrd_query;
}

}  // namespace cfe
