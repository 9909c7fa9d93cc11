#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cfe/series.hpp"

namespace cfe {

// Black-box predictive model. `predict` returns the class label as a real
// in classification mode, or a scalar in regression mode. Implementations
// must be deterministic, side-effect free, and safe to call concurrently.
class PredictiveModel {
 public:
  virtual ~PredictiveModel() = default;
  virtual double predict(const SeriesSample& sample) const = 0;
};

enum class Comparator { greater, less, equal };

struct RuleClause {
  int feature = 0;
  Comparator cmp = Comparator::greater;
  double threshold = 0.0;
};

enum class ClauseCombinator { all, any };

// One level of nesting below the model's top combinator, enough to express
// shapes like d1=0 AND (d2>0 OR d3>0) AND d4>0.
struct ClauseGroup {
  ClauseCombinator combinator = ClauseCombinator::any;
  std::vector<RuleClause> clauses;
};

// Interpretable threshold model: predicts `target_label` iff the clause
// expression holds at every time step from `window_start` to the end,
// otherwise `fallback_label`.
class ThresholdRuleModel : public PredictiveModel {
 public:
  ThresholdRuleModel(ClauseCombinator combinator, std::vector<ClauseGroup> groups,
                     int window_start, int target_label, int fallback_label);

  // Convenience for the common single-level case: every clause becomes its
  // own group under the given combinator.
  static ThresholdRuleModel flat(ClauseCombinator combinator,
                                 std::vector<RuleClause> clauses, int window_start,
                                 int target_label, int fallback_label);

  double predict(const SeriesSample& sample) const override;

  ClauseCombinator combinator() const { return combinator_; }
  const std::vector<ClauseGroup>& groups() const { return groups_; }
  std::vector<RuleClause> flattened_clauses() const;
  int window_start() const { return window_start_; }
  int target_label() const { return target_label_; }
  int fallback_label() const { return fallback_label_; }

 private:
  bool holds_at(const SeriesSample& sample, int k) const;

  ClauseCombinator combinator_;
  std::vector<ClauseGroup> groups_;
  int window_start_;
  int target_label_;
  int fallback_label_;
};

// Majority vote over the n nearest reference samples (Euclidean distance on
// flattened values). Ties in the vote resolve to the smallest label.
class KnnModel : public PredictiveModel {
 public:
  KnnModel(std::vector<std::pair<SeriesSample, int>> references, int n_neighbors);

  // n_neighbors = floor(sqrt(#references)).
  static KnnModel with_sqrt_neighbors(std::vector<std::pair<SeriesSample, int>> references);

  double predict(const SeriesSample& sample) const override;

  int n_neighbors() const { return n_neighbors_; }
  int reference_count() const { return static_cast<int>(labels_.size()); }

 private:
  Eigen::MatrixXd reference_matrix_;  // one flattened sample per row
  std::vector<int> labels_;
  int rows_ = 0;
  int cols_ = 0;
  int n_neighbors_ = 1;
};

// Catalog of the bundled benchmark configurations: series shape plus the
// window length and feature indices of the two threshold models.
struct DatasetInfo {
  std::string id;
  int time_steps = 0;
  int feature_count = 0;
  int rule_window = 0;  // number of trailing steps the rules inspect
};

const DatasetInfo& dataset_info(const std::string& dataset_id);
std::vector<std::string> dataset_ids();

// Feature schema for a catalog dataset: all features actionable with unit
// feasibility weight; life_expectancy carries its two discrete features.
FeatureSchema dataset_schema(const std::string& dataset_id);

// Builds threshold model `variant` (1 = conjunctive, 2 = disjunctive) for a
// catalog dataset at the given shape. Throws ConfigError for unknown ids and
// SchemaError when K or D cannot host the rule.
ThresholdRuleModel build_rule_model(const std::string& dataset_id, int variant, int K, int D);

}  // namespace cfe
