#pragma once

#include "cfe/series.hpp"

namespace cfe {

// Continuous cells count as changed when they differ by more than this;
// discrete cells hold integer codes, so any real change clears it too.
inline constexpr double kSparsityTolerance = 1e-9;

// Feasibility-weighted distance between an original sample and a candidate:
// per feature, L1 over time steps for continuous features and a mismatch
// count for discrete ones, each scaled by the feature's feasibility weight.
double proximity(const SeriesSample& original, const SeriesSample& candidate,
                 const FeatureSchema& schema);

// Number of cells (k, d) whose values differ by more than `tolerance`.
int sparsity(const SeriesSample& original, const SeriesSample& candidate,
             double tolerance = kSparsityTolerance);

// Unweighted L1 change per feature (continuous) or mismatch count
// (discrete); used to attribute which feature a candidate changed most.
Eigen::VectorXd per_feature_change(const SeriesSample& original,
                                   const SeriesSample& candidate,
                                   const FeatureSchema& schema);

}  // namespace cfe
