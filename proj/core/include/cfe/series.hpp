#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cfe {

enum class FeatureKind { continuous, discrete };

// Actionable features can be changed directly by an intervention.
// Non-actionable features only move through causal rules. Immutable
// features never change.
enum class Mutability { actionable, non_actionable, immutable };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  Mutability mutability = Mutability::actionable;
  double feasibility_weight = 1.0;
  int cardinality = 0;  // discrete features: number of category codes
  std::optional<std::pair<double, double>> range;  // continuous features only
};

// Per-feature metadata for a K x D series. Validated on construction:
// at least one actionable feature, positive feasibility weights, discrete
// features carry a positive cardinality.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  int feature_count() const { return static_cast<int>(features_.size()); }
  const FeatureSpec& feature(int d) const { return features_[static_cast<size_t>(d)]; }
  const std::vector<FeatureSpec>& features() const { return features_; }

  // Global indices of actionable features, ascending. An action's feature
  // slot a2 indexes into this list.
  const std::vector<int>& actionable() const { return actionable_; }

  // Number of actionable continuous features (size of the Gaussian head).
  int continuous_actionable_count() const { return continuous_actionable_; }

  // Sum of cardinalities over actionable discrete features (size of the
  // categorical value head).
  int discrete_value_count() const { return discrete_value_count_; }

  bool is_discrete(int d) const { return feature(d).kind == FeatureKind::discrete; }
  bool is_immutable(int d) const { return feature(d).mutability == Mutability::immutable; }

 private:
  std::vector<FeatureSpec> features_;
  std::vector<int> actionable_;
  int continuous_actionable_ = 0;
  int discrete_value_count_ = 0;
};

// One K x D multivariate time-series instance (K = 1 for static data).
// Discrete-feature cells hold integer category codes stored as reals.
struct SeriesSample {
  Eigen::MatrixXd values;  // rows = time steps, cols = features

  SeriesSample() = default;
  explicit SeriesSample(Eigen::MatrixXd v) : values(std::move(v)) {}

  int time_steps() const { return static_cast<int>(values.rows()); }
  int feature_count() const { return static_cast<int>(values.cols()); }

  friend bool operator==(const SeriesSample& a, const SeriesSample& b) {
    return a.values.rows() == b.values.rows() &&
           a.values.cols() == b.values.cols() &&
           (a.values.array() == b.values.array()).all();
  }
};

// Throws SchemaError when the sample violates the schema (column count,
// discrete cells not integral or out of [0, cardinality)).
void validate_sample(const SeriesSample& sample, const FeatureSchema& schema);

// Throws DimensionError when the two samples disagree in shape.
void require_same_shape(const SeriesSample& a, const SeriesSample& b);

// Desired model output: a class label, or a closed interval for regression.
struct TargetSpec {
  enum class Mode { classification, regression };

  Mode mode = Mode::classification;
  int target_class = 1;
  double lower = 0.0;
  double upper = 0.0;

  static TargetSpec for_class(int label) {
    TargetSpec t;
    t.mode = Mode::classification;
    t.target_class = label;
    return t;
  }

  static TargetSpec for_range(double lo, double hi);

  bool satisfied(double prediction) const {
    if (mode == Mode::classification) {
      return prediction == static_cast<double>(target_class);
    }
    return lower <= prediction && prediction <= upper;
  }
};

// A named sample as it appears in a dataset file.
struct DatasetEntry {
  std::string id;
  SeriesSample sample;
  std::optional<int> label;
};

}  // namespace cfe
