#include "cfe/constraints.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>

#include "cfe/errors.hpp"

namespace cfe {

ConstraintSet::ConstraintSet(std::vector<RangeRule> range_rules,
                             std::vector<CausalRule> causal_rules)
    : range_rules_(std::move(range_rules)), causal_rules_(std::move(causal_rules)) {
  for (const CausalRule& rule : causal_rules_) {
    if (rule.trigger_feature == rule.affected_feature) {
      throw ConfigError("causal rule: feature " + std::to_string(rule.trigger_feature) +
                        " cannot trigger itself");
    }
  }
}

SeriesSample apply_constraints(SeriesSample candidate, const SeriesSample& original,
                               const ConstraintSet& constraints,
                               const FeatureSchema& schema) {
  require_same_shape(candidate, original);
  const int steps = candidate.time_steps();

  for (const CausalRule& rule : constraints.causal_rules()) {
    // A trigger at step k pins the affected feature from k onward; a later
    // trigger overrides the tail it covers, so one ascending scan suffices.
    std::optional<double> active;
    for (int k = 0; k < steps; ++k) {
      const double trigger_value = candidate.values(k, rule.trigger_feature);
      if (trigger_value != original.values(k, rule.trigger_feature)) {
        active = rule.mode == CausalRule::Mode::set
                     ? rule.value
                     : rule.alpha * trigger_value + rule.offset;
      }
      if (active) candidate.values(k, rule.affected_feature) = *active;
    }
  }

  for (const RangeRule& rule : constraints.range_rules()) {
    candidate.values.col(rule.feature) =
        candidate.values.col(rule.feature).cwiseMax(rule.lo).cwiseMin(rule.hi);
  }

  for (int d = 0; d < schema.feature_count(); ++d) {
    if (schema.is_immutable(d)) {
      candidate.values.col(d) = original.values.col(d);
    }
  }
  return candidate;
}

}  // namespace cfe
