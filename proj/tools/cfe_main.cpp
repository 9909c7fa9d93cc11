// Command-line shell around the counterfactual search engine.
//
// Subcommands:
//   generate  — search for a counterfactual for one sample
//   evaluate  — run a batch and print/write the metrics
//   synth     — write a synthetic labeled dataset for a catalog config
//   report    — re-render a stored JSON report as text
//
// Exit codes: 0 success, 2 search exhausted without a counterfactual,
// 1 any error. CFE_SEED and CFE_WORKERS override config/auto values.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cfe/checkpoint.hpp"
#include "cfe/dataset_io.hpp"
#include "cfe/errors.hpp"
#include "cfe/eval.hpp"
#include "cfe/report_io.hpp"
#include "cfe/run_config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitExhausted = 2;

std::optional<std::uint64_t> env_u64(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::strtoull(value, nullptr, 10);
}

std::string schema_path_for(const cfe::RunConfig& config, const std::string& input) {
  if (!config.schema_path.empty()) return config.schema_path;
  return input + ".schema.json";
}

void apply_env_overrides(cfe::RunConfig& config, cfe::EvalOptions& options) {
  if (const auto seed = env_u64("CFE_SEED")) config.search.seed = *seed;
  if (const auto workers = env_u64("CFE_WORKERS")) {
    options.workers = static_cast<int>(*workers);
  }
}

int run_generate(const std::string& config_path, const std::string& input,
                 const std::string& sample_id, const std::string& out,
                 const std::string& checkpoint_out) {
  cfe::RunConfig config = cfe::load_run_config(config_path);
  cfe::EvalOptions options;
  apply_env_overrides(config, options);

  auto [schema_file, entries] = cfe::load_dataset(input, schema_path_for(config, input));
  const cfe::DatasetEntry* entry = nullptr;
  for (const cfe::DatasetEntry& candidate : entries) {
    if (candidate.id == sample_id) {
      entry = &candidate;
      break;
    }
  }
  if (entry == nullptr) {
    std::cerr << "error: sample '" << sample_id << "' not found in " << input << "\n";
    return kExitError;
  }

  const auto model = cfe::build_model(config, schema_file.schema, schema_file.time_steps);
  const auto detector = cfe::build_detector(config);

  cfe::SearchConfig search = config.search;
  search.seed = config.search.seed + cfe::fnv1a_hash(sample_id);
  cfe::SearchOutcome outcome =
      cfe::generate_trained(*model, entry->sample, config.target, schema_file.schema,
                            config.constraints, search, detector ? &*detector : nullptr);
  const cfe::SearchReport& report = outcome.report;

  const std::string report_path = !out.empty() ? out : config.output_report;
  if (!report_path.empty()) {
    cfe::write_json_file(report_path, cfe::search_report_to_json(report));
  }
  if (!checkpoint_out.empty() && outcome.policy) {
    cfe::save_policy(checkpoint_out, *outcome.policy);
  }

  if (report.succeeded) {
    std::cout << "found counterfactual for '" << sample_id
              << "' with proximity " << *report.best_proximity << " ("
              << report.cfe_set.size() << " candidate(s), " << report.episodes_run
              << " episode(s))\n";
    return kExitOk;
  }
  std::cout << "search exhausted: no counterfactual for '" << sample_id << "' within "
            << search.max_episodes << " episodes\n";
  return kExitExhausted;
}

int run_evaluate(const std::string& config_path, const std::string& input,
                 const std::string& out, bool plausibility_compare, int workers_flag) {
  cfe::RunConfig config = cfe::load_run_config(config_path);
  cfe::EvalOptions options;
  if (workers_flag > 0) options.workers = workers_flag;
  apply_env_overrides(config, options);

  auto [schema_file, entries] = cfe::load_dataset(input, schema_path_for(config, input));
  if (entries.empty()) {
    std::cerr << "error: dataset '" << input << "' has no samples\n";
    return kExitError;
  }
  const auto model = cfe::build_model(config, schema_file.schema, schema_file.time_steps);
  const auto detector = cfe::build_detector(config);

  std::vector<std::pair<std::string, cfe::BatchResult>> rows;
  nlohmann::json doc;
  if (plausibility_compare) {
    if (!detector) {
      std::cerr << "error: --plausibility-compare needs a 'plausibility' config section\n";
      return kExitError;
    }
    cfe::PlausibilityComparison comparison = cfe::compare_plausibility_modes(
        *model, entries, config.target, schema_file.schema, config.constraints,
        config.search, *detector, options);
    doc = cfe::comparison_to_json(comparison);
    rows.emplace_back("gate off", std::move(comparison.ungated));
    rows.emplace_back("gate on", std::move(comparison.gated));
  } else {
    cfe::BatchResult batch = cfe::evaluate_batch(*model, entries, config.target,
                                                 schema_file.schema, config.constraints,
                                                 config.search,
                                                 detector ? &*detector : nullptr, options);
    doc = cfe::metrics_to_json(batch);
    rows.emplace_back("batch", std::move(batch));
  }

  std::cout << cfe::metrics_table(rows);
  const std::string metrics_path = !out.empty() ? out : config.output_metrics;
  if (!metrics_path.empty()) {
    cfe::write_json_file(metrics_path, doc);
  }
  return kExitOk;
}

int run_synth(const std::string& dataset_id, int variant, int n, std::uint64_t seed,
              double sigma, const std::string& out) {
  const cfe::DatasetInfo& info = cfe::dataset_info(dataset_id);
  const cfe::FeatureSchema schema = cfe::dataset_schema(dataset_id);
  const cfe::ThresholdRuleModel rule =
      cfe::build_rule_model(dataset_id, variant, info.time_steps, info.feature_count);

  cfe::SynthSpec spec;
  spec.time_steps = info.time_steps;
  spec.feature_count = info.feature_count;
  spec.n_samples = n;
  spec.noise_sigma = sigma;
  spec.seed = seed;
  const std::vector<cfe::DatasetEntry> entries = cfe::synth_dataset(spec, rule, schema);

  cfe::save_dataset(out, entries, schema);
  cfe::save_schema(out + ".schema.json", schema, info.time_steps);
  cfe::write_json_file(out + ".model.json", cfe::rule_model_to_json(rule));
  std::cout << "wrote " << entries.size() << " samples (K=" << info.time_steps
            << ", D=" << info.feature_count << ") to " << out << "\n";
  return kExitOk;
}

int run_report(const std::string& in) {
  const nlohmann::json doc = cfe::read_json_file(in);
  if (doc.contains("summary")) {
    const auto& summary = doc["summary"];
    auto rate = [&](const char* key) -> std::string {
      return summary.contains(key) ? summary[key].dump() : "---";
    };
    std::cout << "invalid samples:   " << summary.value("n_invalid", 0) << "\n"
              << "success rate:      " << rate("success_rate") << "\n"
              << "validity rate:     " << rate("validity_rate") << "\n"
              << "plausibility rate: " << rate("plausibility_rate") << "\n"
              << "mean proximity:    " << rate("mean_proximity") << "\n"
              << "mean sparsity:     " << rate("mean_sparsity") << "\n";
    return kExitOk;
  }
  if (doc.contains("succeeded")) {
    const cfe::SearchReport report = cfe::search_report_from_json(doc);
    std::cout << (report.succeeded ? "succeeded" : "exhausted") << ", "
              << report.cfe_set.size() << " counterfactual(s), " << report.episodes_run
              << " episode(s)";
    if (report.best_proximity) std::cout << ", best proximity " << *report.best_proximity;
    std::cout << "\n";
    return kExitOk;
  }
  if (doc.contains("ungated") && doc.contains("gated")) {
    std::cout << "plausibility comparison (gate off vs on):\n"
              << "  success:   " << doc["ungated"]["summary"].value("success_rate", 0.0)
              << " -> " << doc["gated"]["summary"].value("success_rate", 0.0) << "\n";
    return kExitOk;
  }
  std::cerr << "error: unrecognized report structure in " << in << "\n";
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-agnostic counterfactual-explanation search engine"};
  app.require_subcommand(1);

  std::string config_path, input, sample_id, out, checkpoint_out, dataset_id, in_path;
  int variant = 1;
  int n_samples = 100;
  int workers = 0;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  bool plausibility_compare = false;

  CLI::App* generate = app.add_subcommand("generate", "search one sample");
  generate->add_option("--config", config_path, "run configuration (JSON)")->required();
  generate->add_option("--input", input, "dataset CSV")->required();
  generate->add_option("--sample-id", sample_id, "sample to explain")->required();
  generate->add_option("--out", out, "search report path (JSON)");
  generate->add_option("--checkpoint-out", checkpoint_out, "policy checkpoint path");

  CLI::App* evaluate = app.add_subcommand("evaluate", "run a batch and report metrics");
  evaluate->add_option("--config", config_path, "run configuration (JSON)")->required();
  evaluate->add_option("--input", input, "dataset CSV")->required();
  evaluate->add_option("--out", out, "metrics report path (JSON)");
  evaluate->add_flag("--plausibility-compare", plausibility_compare,
                     "run twice: plausibility gate off, then on");
  evaluate->add_option("--workers", workers, "worker threads (default: auto)");

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic labeled dataset");
  synth->add_option("--dataset-id", dataset_id, "catalog dataset id")->required();
  synth->add_option("--variant", variant, "rule model variant (1 or 2)");
  synth->add_option("--n", n_samples, "number of samples");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--sigma", sigma, "cell noise stddev");
  synth->add_option("--out", out, "output CSV path")->required();

  CLI::App* report = app.add_subcommand("report", "render a stored JSON report");
  report->add_option("--in", in_path, "report path (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      return run_generate(config_path, input, sample_id, out, checkpoint_out);
    }
    if (evaluate->parsed()) {
      return run_evaluate(config_path, input, out, plausibility_compare, workers);
    }
    if (synth->parsed()) {
      return run_synth(dataset_id, variant, n_samples, seed, sigma, out);
    }
    if (report->parsed()) {
      return run_report(in_path);
    }
  } catch (const cfe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
