#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written as plain scalar loops, sharing no
// code with the implementations under test.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cfe/series.hpp"

namespace oracles {

// Eq-style weighted distance: per feature, sum of |diff| over steps for
// continuous features, count of mismatches for discrete ones, times the
// feature's weight.
inline double proximity(const cfe::SeriesSample& a, const cfe::SeriesSample& b,
                        const cfe::FeatureSchema& schema) {
  double total = 0.0;
  for (int d = 0; d < schema.feature_count(); ++d) {
    double feature_term = 0.0;
    for (int k = 0; k < a.time_steps(); ++k) {
      if (schema.feature(d).kind == cfe::FeatureKind::discrete) {
        feature_term += a.values(k, d) != b.values(k, d) ? 1.0 : 0.0;
      } else {
        feature_term += std::abs(a.values(k, d) - b.values(k, d));
      }
    }
    total += schema.feature(d).feasibility_weight * feature_term;
  }
  return total;
}

inline int sparsity(const cfe::SeriesSample& a, const cfe::SeriesSample& b,
                    double tolerance) {
  int count = 0;
  for (int k = 0; k < a.time_steps(); ++k) {
    for (int d = 0; d < a.feature_count(); ++d) {
      if (std::abs(a.values(k, d) - b.values(k, d)) > tolerance) ++count;
    }
  }
  return count;
}

inline double euclidean(const cfe::SeriesSample& a, const cfe::SeriesSample& b) {
  double sum = 0.0;
  for (int k = 0; k < a.time_steps(); ++k) {
    for (int d = 0; d < a.feature_count(); ++d) {
      const double diff = a.values(k, d) - b.values(k, d);
      sum += diff * diff;
    }
  }
  return std::sqrt(sum);
}

// Exhaustive-sort KNN vote, ties resolved to the smallest label.
inline int knn_predict(const std::vector<std::pair<cfe::SeriesSample, int>>& references,
                       const cfe::SeriesSample& query, int n_neighbors) {
  std::vector<int> order(references.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return euclidean(references[static_cast<size_t>(x)].first, query) <
           euclidean(references[static_cast<size_t>(y)].first, query);
  });
  std::vector<int> votes;
  for (int i = 0; i < n_neighbors; ++i) {
    votes.push_back(references[static_cast<size_t>(order[static_cast<size_t>(i)])].second);
  }
  std::sort(votes.begin(), votes.end());
  int best_label = votes.front();
  int best_count = 0;
  for (size_t i = 0; i < votes.size();) {
    size_t j = i;
    while (j < votes.size() && votes[j] == votes[i]) ++j;
    if (static_cast<int>(j - i) > best_count) {
      best_count = static_cast<int>(j - i);
      best_label = votes[i];
    }
    i = j;
  }
  return best_label;
}

// Brute-force LOF of a query against a reference set (queries are never
// members of the set). Classical reachability-density definition.
inline double lof_score(const std::vector<std::vector<double>>& refs,
                        const std::vector<double>& query, int k) {
  const int n = static_cast<int>(refs.size());
  auto dist = [](const std::vector<double>& x, const std::vector<double>& y) {
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(sum);
  };
  auto k_nearest = [&](const std::vector<double>& point, int skip) {
    std::vector<int> order;
    for (int i = 0; i < n; ++i) {
      if (i != skip) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return dist(refs[static_cast<size_t>(x)], point) <
             dist(refs[static_cast<size_t>(y)], point);
    });
    order.resize(static_cast<size_t>(k));
    return order;
  };

  std::vector<double> k_dist(static_cast<size_t>(n));
  std::vector<std::vector<int>> neighborhoods(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    neighborhoods[static_cast<size_t>(i)] = k_nearest(refs[static_cast<size_t>(i)], i);
    k_dist[static_cast<size_t>(i)] =
        dist(refs[static_cast<size_t>(i)],
             refs[static_cast<size_t>(neighborhoods[static_cast<size_t>(i)].back())]);
  }
  auto lrd = [&](const std::vector<double>& point, const std::vector<int>& neighbors) {
    double reach = 0.0;
    for (int o : neighbors) {
      reach += std::max(k_dist[static_cast<size_t>(o)], dist(point, refs[static_cast<size_t>(o)]));
    }
    return reach > 0.0 ? k / reach : std::numeric_limits<double>::infinity();
  };

  const std::vector<int> query_neighbors = k_nearest(query, -1);
  const double query_lrd = lrd(query, query_neighbors);
  double neighbor_lrd_sum = 0.0;
  for (int o : query_neighbors) {
    neighbor_lrd_sum +=
        lrd(refs[static_cast<size_t>(o)], neighborhoods[static_cast<size_t>(o)]);
  }
  return (neighbor_lrd_sum / k) / query_lrd;
}

// Tail returns by direct double summation of the definition.
inline std::vector<double> discounted_returns(const std::vector<double>& rewards,
                                              double gamma) {
  const int T = static_cast<int>(rewards.size());
  std::vector<double> returns(static_cast<size_t>(T), 0.0);
  for (int t = 0; t < T; ++t) {
    double g = 0.0;
    for (int tp = t + 1; tp <= T; ++tp) {
      g += std::pow(gamma, tp - t - 1) * rewards[static_cast<size_t>(tp - 1)];
    }
    returns[static_cast<size_t>(t)] = g;
  }
  return returns;
}

}  // namespace oracles
