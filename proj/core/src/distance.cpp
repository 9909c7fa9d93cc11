#include "cfe/distance.hpp"

#include <cmath>

#include "cfe/errors.hpp"

namespace cfe {

double proximity(const SeriesSample& original, const SeriesSample& candidate,
                 const FeatureSchema& schema) {
  require_same_shape(original, candidate);
  if (original.feature_count() != schema.feature_count()) {
    throw DimensionError("proximity: sample width does not match schema");
  }
  double total = 0.0;
  for (int d = 0; d < schema.feature_count(); ++d) {
    const double beta = schema.feature(d).feasibility_weight;
    if (schema.is_discrete(d)) {
      const auto mismatches =
          (original.values.col(d).array() != candidate.values.col(d).array()).count();
      total += beta * static_cast<double>(mismatches);
    } else {
      total += beta * (original.values.col(d) - candidate.values.col(d)).lpNorm<1>();
    }
  }
  return total;
}

int sparsity(const SeriesSample& original, const SeriesSample& candidate,
             double tolerance) {
  require_same_shape(original, candidate);
  return static_cast<int>(
      ((original.values - candidate.values).array().abs() > tolerance).count());
}

Eigen::VectorXd per_feature_change(const SeriesSample& original,
                                   const SeriesSample& candidate,
                                   const FeatureSchema& schema) {
  require_same_shape(original, candidate);
  Eigen::VectorXd change(schema.feature_count());
  for (int d = 0; d < schema.feature_count(); ++d) {
    if (schema.is_discrete(d)) {
      change[d] = static_cast<double>(
          (original.values.col(d).array() != candidate.values.col(d).array()).count());
    } else {
      change[d] = (original.values.col(d) - candidate.values.col(d)).lpNorm<1>();
    }
  }
  return change;
}

}  // namespace cfe
