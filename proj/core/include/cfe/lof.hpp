#pragma once

#include <vector>

#include "cfe/series.hpp"

namespace cfe {

// Local-outlier-factor detector over flattened reference samples. The score
// is the classical density ratio: mean local reachability density of the
// query's k nearest references divided by the query's own. Scores near 1
// mean in-distribution; the gate accepts scores up to `threshold`.
class LofDetector {
 public:
  static constexpr int kDefaultNeighbors = 20;
  static constexpr double kDefaultThreshold = 1.5;

  LofDetector(const std::vector<SeriesSample>& references, int n_neighbors = kDefaultNeighbors,
              double threshold = kDefaultThreshold);

  double score(const SeriesSample& sample) const;
  bool is_inlier(const SeriesSample& sample) const { return score(sample) <= threshold_; }

  int n_neighbors() const { return n_neighbors_; }
  double threshold() const { return threshold_; }
  int reference_count() const { return static_cast<int>(reference_matrix_.rows()); }

 private:
  std::vector<int> nearest(const Eigen::VectorXd& dists, int count, int skip_index) const;

  Eigen::MatrixXd reference_matrix_;  // one flattened sample per row
  Eigen::VectorXd k_distance_;        // per reference
  Eigen::VectorXd lrd_;               // local reachability density per reference
  int rows_ = 0;
  int cols_ = 0;
  int n_neighbors_ = kDefaultNeighbors;
  double threshold_ = kDefaultThreshold;
};

}  // namespace cfe
