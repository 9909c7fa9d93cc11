#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cfe/constraints.hpp"
#include "cfe/lof.hpp"
#include "cfe/models.hpp"
#include "cfe/policy.hpp"
#include "cfe/series.hpp"

namespace cfe {

struct SearchConfig {
  double proximity_weight = 0.001;  // trade-off between hitting the target and staying close
  int max_episodes = 100;
  int max_interventions = 100;
  double discount = 0.99;
  double learning_rate = 1e-4;
  double weight_decay = 0.0;
  bool enforce_plausibility = false;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct EpisodeRecord {
  int interventions = 0;
  double reward_sum = 0.0;
  bool found = false;                 // a new counterfactual entered the set
  bool rejected_implausible = false;  // target hit but the detector refused it
  bool discarded = false;             // update aborted on a numeric error
};

struct SearchReport {
  std::vector<SeriesSample> cfe_set;       // insertion order
  std::optional<SeriesSample> best;        // lowest-proximity member
  std::optional<double> best_proximity;
  int episodes_run = 0;
  std::vector<EpisodeRecord> episodes;
  bool succeeded = false;
};

// Applies an action to a state: a continuous intervention adds its strength
// to the feature from the chosen step onward; a discrete one overwrites the
// suffix with the chosen category code.
SeriesSample transition(const SeriesSample& state, const ActionTriple& action,
                        const FeatureSchema& schema);

// 1 - lambda * prox when the prediction satisfies the target, else 0.
double reward(double prediction, const TargetSpec& target, double prox, double lambda);

// One policy rollout of up to max_interventions steps. A newly found valid
// counterfactual ends the episode early (and joins cfe_set unless the
// plausibility gate rejects it); the recorded trajectory then drives one
// REINFORCE pass. Throws ModelError through from the model; NumericError
// from the update leaves the policy rolled back.
EpisodeRecord run_episode(PolicyNetwork& policy, AdamOptimizer& optimizer,
                          const PredictiveModel& model, const SeriesSample& origin,
                          const TargetSpec& target, const FeatureSchema& schema,
                          const ConstraintSet& constraints, const SearchConfig& config,
                          std::vector<SeriesSample>& cfe_set, Rng& rng,
                          const LofDetector* detector = nullptr);

// Full search: trains a fresh policy against the model for up to
// max_episodes episodes and reports the collected counterfactuals, with the
// lowest-proximity one selected (ties keep the earliest). An origin that
// already satisfies the target short-circuits to a trivial report.
SearchReport generate(const PredictiveModel& model, const SeriesSample& origin,
                      const TargetSpec& target, const FeatureSchema& schema,
                      const ConstraintSet& constraints, const SearchConfig& config,
                      const LofDetector* detector = nullptr);

// Same search, but also hands back the trained policy (for checkpointing).
// The policy is absent when the origin already satisfied the target.
struct SearchOutcome {
  SearchReport report;
  std::optional<PolicyNetwork> policy;
};
SearchOutcome generate_trained(const PredictiveModel& model, const SeriesSample& origin,
                               const TargetSpec& target, const FeatureSchema& schema,
                               const ConstraintSet& constraints, const SearchConfig& config,
                               const LofDetector* detector = nullptr);

}  // namespace cfe
