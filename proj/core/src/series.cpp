#include "cfe/series.hpp"

#include <cmath>

#include "cfe/errors.hpp"

namespace cfe {

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features)
    : features_(std::move(features)) {
  if (features_.empty()) {
    throw SchemaError("schema must declare at least one feature");
  }
  for (int d = 0; d < feature_count(); ++d) {
    const FeatureSpec& f = features_[static_cast<size_t>(d)];
    if (f.feasibility_weight <= 0.0) {
      throw SchemaError("feature '" + f.name + "': feasibility weight must be positive");
    }
    if (f.kind == FeatureKind::discrete && f.cardinality <= 0) {
      throw SchemaError("feature '" + f.name + "': discrete feature needs a positive cardinality");
    }
    if (f.range && f.range->first > f.range->second) {
      throw SchemaError("feature '" + f.name + "': empty range");
    }
    if (f.mutability == Mutability::actionable) {
      actionable_.push_back(d);
      if (f.kind == FeatureKind::continuous) {
        ++continuous_actionable_;
      } else {
        discrete_value_count_ += f.cardinality;
      }
    }
  }
  if (actionable_.empty()) {
    throw SchemaError("schema must declare at least one actionable feature");
  }
}

void validate_sample(const SeriesSample& sample, const FeatureSchema& schema) {
  if (sample.feature_count() != schema.feature_count()) {
    throw SchemaError("sample has " + std::to_string(sample.feature_count()) +
                      " features, schema declares " + std::to_string(schema.feature_count()));
  }
  if (sample.time_steps() < 1) {
    throw SchemaError("sample must have at least one time step");
  }
  for (int d = 0; d < schema.feature_count(); ++d) {
    if (!schema.is_discrete(d)) continue;
    const int cardinality = schema.feature(d).cardinality;
    for (int k = 0; k < sample.time_steps(); ++k) {
      const double v = sample.values(k, d);
      if (v != std::floor(v) || v < 0.0 || v >= static_cast<double>(cardinality)) {
        throw SchemaError("feature '" + schema.feature(d).name + "' at step " +
                          std::to_string(k) + ": value " + std::to_string(v) +
                          " is not a category code in [0, " +
                          std::to_string(cardinality) + ")");
      }
    }
  }
}

void require_same_shape(const SeriesSample& a, const SeriesSample& b) {
  if (a.time_steps() != b.time_steps() || a.feature_count() != b.feature_count()) {
    throw DimensionError("sample shapes differ: " + std::to_string(a.time_steps()) + "x" +
                         std::to_string(a.feature_count()) + " vs " +
                         std::to_string(b.time_steps()) + "x" +
                         std::to_string(b.feature_count()));
  }
}

TargetSpec TargetSpec::for_range(double lo, double hi) {
  if (lo > hi) {
    throw ConfigError("regression target: lower bound exceeds upper bound");
  }
  TargetSpec t;
  t.mode = Mode::regression;
  t.lower = lo;
  t.upper = hi;
  return t;
}

}  // namespace cfe
