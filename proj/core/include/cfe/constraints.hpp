#pragma once

#include <vector>

#include "cfe/series.hpp"

namespace cfe {

// Keeps a feature inside [lo, hi] at every time step.
struct RangeRule {
  int feature = 0;
  double lo = 0.0;
  double hi = 0.0;
};

// Whenever `trigger_feature` differs from the original at step k, the
// affected feature is rewritten at every step >= k: to `value` (set mode)
// or to alpha * x[k][trigger] + offset (linear mode, evaluated at the
// trigger step).
struct CausalRule {
  enum class Mode { set, linear };

  int trigger_feature = 0;
  int affected_feature = 0;
  Mode mode = Mode::set;
  double value = 0.0;   // set mode
  double alpha = 0.0;   // linear mode
  double offset = 0.0;  // linear mode
};

class ConstraintSet {
 public:
  ConstraintSet() = default;
  ConstraintSet(std::vector<RangeRule> range_rules, std::vector<CausalRule> causal_rules);

  const std::vector<RangeRule>& range_rules() const { return range_rules_; }
  const std::vector<CausalRule>& causal_rules() const { return causal_rules_; }
  bool empty() const { return range_rules_.empty() && causal_rules_.empty(); }

 private:
  std::vector<RangeRule> range_rules_;
  std::vector<CausalRule> causal_rules_;
};

// Applies, in order: causal rules (listed order, triggers evaluated against
// the original), range clamping, and immutable-feature restoration from the
// original. Total and idempotent.
SeriesSample apply_constraints(SeriesSample candidate, const SeriesSample& original,
                               const ConstraintSet& constraints,
                               const FeatureSchema& schema);

}  // namespace cfe
