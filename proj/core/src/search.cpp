#include "cfe/search.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cfe/distance.hpp"
#include "cfe/errors.hpp"

namespace cfe {

void SearchConfig::validate() const {
  if (proximity_weight < 0.0) throw ConfigError("proximity weight must be non-negative");
  if (max_episodes < 1) throw ConfigError("max_episodes must be at least 1");
  if (max_interventions < 1) throw ConfigError("max_interventions must be at least 1");
  if (discount <= 0.0 || discount > 1.0) throw ConfigError("discount must be in (0, 1]");
  if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
}

SeriesSample transition(const SeriesSample& state, const ActionTriple& action,
                        const FeatureSchema& schema) {
  const int feature = schema.actionable()[static_cast<size_t>(action.feature_slot)];
  SeriesSample next = state;
  const int steps = state.time_steps();
  if (schema.is_discrete(feature)) {
    for (int k = action.time_step; k < steps; ++k) {
      next.values(k, feature) = action.value;
    }
  } else {
    for (int k = action.time_step; k < steps; ++k) {
      next.values(k, feature) += action.value;
    }
  }
  return next;
}

double reward(double prediction, const TargetSpec& target, double prox, double lambda) {
  return target.satisfied(prediction) ? 1.0 - lambda * prox : 0.0;
}

namespace {

bool contains(const std::vector<SeriesSample>& set, const SeriesSample& sample) {
  return std::find(set.begin(), set.end(), sample) != set.end();
}

}  // namespace

EpisodeRecord run_episode(PolicyNetwork& policy, AdamOptimizer& optimizer,
                          const PredictiveModel& model, const SeriesSample& origin,
                          const TargetSpec& target, const FeatureSchema& schema,
                          const ConstraintSet& constraints, const SearchConfig& config,
                          std::vector<SeriesSample>& cfe_set, Rng& rng,
                          const LofDetector* detector) {
  EpisodeRecord record;
  std::vector<TimeStep> trajectory;
  trajectory.reserve(static_cast<size_t>(config.max_interventions));

  SeriesSample state = origin;
  for (int t = 0; t < config.max_interventions; ++t) {
    const DistributionParams dist = policy.forward(state);
    const ActionTriple action = policy.sample_action(dist, rng);
    SeriesSample next = transition(state, action, schema);
    next = apply_constraints(std::move(next), origin, constraints, schema);

    const double prediction = model.predict(next);
    const double prox = proximity(origin, next, schema);
    const double r = reward(prediction, target, prox, config.proximity_weight);
    trajectory.push_back({std::move(state), action, r});
    record.reward_sum += r;

    if (target.satisfied(prediction) && !contains(cfe_set, next)) {
      const bool plausible =
          !config.enforce_plausibility || detector == nullptr || detector->is_inlier(next);
      if (plausible) {
        cfe_set.push_back(next);
        record.found = true;
      } else {
        record.rejected_implausible = true;
      }
      record.interventions = t + 1;
      break;
    }
    state = std::move(next);
    record.interventions = t + 1;
  }

  try {
    reinforce_update(policy, optimizer, trajectory, config.discount);
  } catch (const NumericError&) {
    record.discarded = true;
  }
  return record;
}

SearchOutcome generate_trained(const PredictiveModel& model, const SeriesSample& origin,
                               const TargetSpec& target, const FeatureSchema& schema,
                               const ConstraintSet& constraints, const SearchConfig& config,
                               const LofDetector* detector) {
  config.validate();
  if (origin.feature_count() != schema.feature_count()) {
    throw DimensionError("origin sample width does not match schema");
  }

  SearchOutcome outcome;
  SearchReport& report = outcome.report;
  if (target.satisfied(model.predict(origin))) {
    report.cfe_set.push_back(origin);
    report.best = origin;
    report.best_proximity = 0.0;
    report.succeeded = true;
    return outcome;
  }

  Rng rng(config.seed);
  PolicyNetwork policy(ActionLayout::from_schema(schema, origin.time_steps()));
  policy.init_weights(rng);
  AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  adam.weight_decay = config.weight_decay;
  AdamOptimizer optimizer(policy.params, adam);

  for (int episode = 0; episode < config.max_episodes; ++episode) {
    report.episodes.push_back(run_episode(policy, optimizer, model, origin, target,
                                          schema, constraints, config, report.cfe_set,
                                          rng, detector));
    ++report.episodes_run;
  }

  if (!report.cfe_set.empty()) {
    report.succeeded = true;
    size_t best_index = 0;
    double best_prox = proximity(origin, report.cfe_set.front(), schema);
    for (size_t i = 1; i < report.cfe_set.size(); ++i) {
      const double prox = proximity(origin, report.cfe_set[i], schema);
      if (prox < best_prox) {
        best_prox = prox;
        best_index = i;
      }
    }
    report.best = report.cfe_set[best_index];
    report.best_proximity = best_prox;
  }
  outcome.policy = std::move(policy);
  return outcome;
}

SearchReport generate(const PredictiveModel& model, const SeriesSample& origin,
                      const TargetSpec& target, const FeatureSchema& schema,
                      const ConstraintSet& constraints, const SearchConfig& config,
                      const LofDetector* detector) {
  return generate_trained(model, origin, target, schema, constraints, config, detector)
      .report;
}

}  // namespace cfe
