#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfe/search.hpp"

namespace cfe {

// Batch counters and the five headline metrics. Rates are percentages and
// absent (not zero) when their denominator is zero; plausibility is absent
// when no detector was supplied.
struct MetricsSummary {
  int n_invalid = 0;   // samples the model assigns the undesired output
  int n_inv_val = 0;   // invalid samples for which a valid CFE came back
  int n_cfe = 0;       // searches that returned a CFE
  int n_val = 0;       // returned CFEs that satisfy the target
  int n_plau_val = 0;  // valid CFEs the detector accepts

  std::optional<double> success_rate;
  std::optional<double> validity_rate;
  std::optional<double> plausibility_rate;
  std::optional<double> mean_proximity;
  std::optional<double> mean_sparsity;
};

struct SampleResult {
  std::string id;
  SearchReport report;
  double proximity = 0.0;  // of the selected CFE, when succeeded
  int sparsity = 0;
  bool plausible = false;  // per detector, when available
  int episodes = 0;
  double wall_ms = 0.0;  // measured; excluded from serialized reports
};

struct BatchResult {
  MetricsSummary summary;
  std::vector<SampleResult> results;  // one per invalid sample, input order
  int skipped_already_valid = 0;
};

struct EvalOptions {
  int workers = 0;  // 0 = hardware concurrency (capped by batch size)
};

// Runs the search on every invalid sample of the batch and aggregates the
// metrics. Per-sample seeds are config.seed + fnv1a(sample id), so results
// do not depend on worker count or scheduling.
BatchResult evaluate_batch(const PredictiveModel& model,
                           const std::vector<DatasetEntry>& samples,
                           const TargetSpec& target, const FeatureSchema& schema,
                           const ConstraintSet& constraints, const SearchConfig& config,
                           const LofDetector* detector = nullptr,
                           const EvalOptions& options = {});

struct PlausibilityComparison {
  BatchResult ungated;
  BatchResult gated;
};

// Same batch twice under identical seeds: plausibility gate off, then on.
PlausibilityComparison compare_plausibility_modes(
    const PredictiveModel& model, const std::vector<DatasetEntry>& samples,
    const TargetSpec& target, const FeatureSchema& schema,
    const ConstraintSet& constraints, const SearchConfig& config,
    const LofDetector& detector, const EvalOptions& options = {});

struct SynthSpec {
  int time_steps = 1;
  int feature_count = 1;
  int n_samples = 1;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;
};

// Gaussian series (zero mean, noise_sigma stddev per continuous cell;
// uniform category codes for discrete features) labeled by the rule model.
std::vector<DatasetEntry> synth_dataset(const SynthSpec& spec,
                                        const ThresholdRuleModel& label_rule,
                                        const FeatureSchema& schema);

}  // namespace cfe
