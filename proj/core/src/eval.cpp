#include "cfe/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "cfe/distance.hpp"
#include "cfe/errors.hpp"

namespace cfe {

namespace {

int resolve_workers(const EvalOptions& options, int batch_size) {
  int workers = options.workers;
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  return std::max(1, std::min(workers, batch_size));
}

}  // namespace

BatchResult evaluate_batch(const PredictiveModel& model,
                           const std::vector<DatasetEntry>& samples,
                           const TargetSpec& target, const FeatureSchema& schema,
                           const ConstraintSet& constraints, const SearchConfig& config,
                           const LofDetector* detector, const EvalOptions& options) {
  if (samples.empty()) {
    throw ConfigError("evaluate_batch needs a non-empty sample list");
  }
  config.validate();

  BatchResult batch;
  std::vector<const DatasetEntry*> invalid;
  for (const DatasetEntry& entry : samples) {
    if (target.satisfied(model.predict(entry.sample))) {
      ++batch.skipped_already_valid;
    } else {
      invalid.push_back(&entry);
    }
  }
  batch.summary.n_invalid = static_cast<int>(invalid.size());
  if (invalid.empty()) {
    return batch;  // all rates undefined
  }

  batch.results.resize(invalid.size());
  std::atomic<size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const size_t index = cursor.fetch_add(1);
      if (index >= invalid.size()) return;
      const DatasetEntry& entry = *invalid[index];
      try {
        SearchConfig per_sample = config;
        per_sample.seed = config.seed + fnv1a_hash(entry.id);
        const auto start = std::chrono::steady_clock::now();
        SearchReport report = generate(model, entry.sample, target, schema, constraints,
                                       per_sample, detector);
        const auto stop = std::chrono::steady_clock::now();

        SampleResult result;
        result.id = entry.id;
        result.episodes = report.episodes_run;
        result.wall_ms =
            std::chrono::duration<double, std::milli>(stop - start).count();
        if (report.succeeded) {
          result.proximity = *report.best_proximity;
          result.sparsity = sparsity(entry.sample, *report.best);
          result.plausible = detector != nullptr && detector->is_inlier(*report.best);
        }
        result.report = std::move(report);
        batch.results[index] = std::move(result);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_workers = resolve_workers(options, static_cast<int>(invalid.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  MetricsSummary& m = batch.summary;
  double prox_sum = 0.0;
  double sparsity_sum = 0.0;
  for (const SampleResult& result : batch.results) {
    if (!result.report.succeeded) continue;
    ++m.n_inv_val;
    ++m.n_cfe;
    ++m.n_val;  // the engine only ever returns valid CFEs
    if (result.plausible) ++m.n_plau_val;
    prox_sum += result.proximity;
    sparsity_sum += result.sparsity;
  }
  m.success_rate = 100.0 * m.n_inv_val / m.n_invalid;
  if (m.n_cfe > 0) {
    m.validity_rate = 100.0 * m.n_val / m.n_cfe;
  }
  if (m.n_val > 0) {
    if (detector != nullptr) {
      m.plausibility_rate = 100.0 * m.n_plau_val / m.n_val;
    }
    m.mean_proximity = prox_sum / m.n_val;
    m.mean_sparsity = sparsity_sum / m.n_val;
  }
  return batch;
}

PlausibilityComparison compare_plausibility_modes(
    const PredictiveModel& model, const std::vector<DatasetEntry>& samples,
    const TargetSpec& target, const FeatureSchema& schema,
    const ConstraintSet& constraints, const SearchConfig& config,
    const LofDetector& detector, const EvalOptions& options) {
  PlausibilityComparison comparison;
  SearchConfig ungated = config;
  ungated.enforce_plausibility = false;
  comparison.ungated =
      evaluate_batch(model, samples, target, schema, constraints, ungated, &detector,
                     options);
  SearchConfig gated = config;
  gated.enforce_plausibility = true;
  comparison.gated = evaluate_batch(model, samples, target, schema, constraints, gated,
                                    &detector, options);
  return comparison;
}

std::vector<DatasetEntry> synth_dataset(const SynthSpec& spec,
                                        const ThresholdRuleModel& label_rule,
                                        const FeatureSchema& schema) {
  if (spec.n_samples < 1) throw ConfigError("synth_dataset needs n_samples >= 1");
  if (spec.time_steps < 1 || spec.feature_count < 1) {
    throw ConfigError("synth_dataset needs a positive K and D");
  }
  if (spec.feature_count != schema.feature_count()) {
    throw DimensionError("synth spec width does not match schema");
  }
  Rng rng(spec.seed);
  std::vector<DatasetEntry> entries;
  entries.reserve(static_cast<size_t>(spec.n_samples));
  for (int i = 0; i < spec.n_samples; ++i) {
    SeriesSample sample(Eigen::MatrixXd(spec.time_steps, spec.feature_count));
    for (int k = 0; k < spec.time_steps; ++k) {
      for (int d = 0; d < spec.feature_count; ++d) {
        if (schema.is_discrete(d)) {
          const int cardinality = schema.feature(d).cardinality;
          sample.values(k, d) =
              spec.noise_sigma == 0.0
                  ? 0.0
                  : static_cast<double>(std::min(
                        cardinality - 1, static_cast<int>(rng.uniform() * cardinality)));
        } else {
          sample.values(k, d) = rng.normal(0.0, spec.noise_sigma);
        }
      }
    }
    DatasetEntry entry;
    entry.id = "s" + std::to_string(i);
    entry.label = static_cast<int>(label_rule.predict(sample));
    entry.sample = std::move(sample);
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace cfe
