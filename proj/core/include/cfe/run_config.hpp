#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "cfe/constraints.hpp"
#include "cfe/lof.hpp"
#include "cfe/models.hpp"
#include "cfe/search.hpp"

namespace cfe {

// JSON run configuration. Recognized sections (unknown keys anywhere are
// rejected):
//   search:       lambda, max_episodes, max_interventions, discount,
//                 learning_rate, weight_decay, seed, enforce_plausibility
//   target:       mode ("classification" | "regression"), target_class |
//                 lower/upper
//   model:        kind ("rule" | "knn" | "external-command") + parameters
//   constraints:  range_rules, causal_rules (optional)
//   data:         schema (path to the schema document)
//   plausibility: references (dataset path), n_neighbors, threshold (optional)
//   output:       report, metrics (optional path defaults)
struct RunConfig {
  struct ModelSpec {
    std::string kind;
    // rule
    std::string dataset_id;
    int variant = 1;
    std::optional<nlohmann::json> definition;
    // knn
    std::string references_path;
    int n_neighbors = 0;  // 0 = floor(sqrt(N))
    // external-command
    std::string command;
    int timeout_ms = 10000;
  };

  struct PlausibilitySpec {
    std::string references_path;
    int n_neighbors = LofDetector::kDefaultNeighbors;
    double threshold = LofDetector::kDefaultThreshold;
  };

  SearchConfig search;
  TargetSpec target;
  ConstraintSet constraints;
  ModelSpec model;
  std::string schema_path;
  std::optional<PlausibilitySpec> plausibility;
  std::string output_report;
  std::string output_metrics;
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

// Instantiates the configured model. K and the schema come from the loaded
// dataset; relative reference paths resolve against the caller's cwd.
std::unique_ptr<PredictiveModel> build_model(const RunConfig& config,
                                             const FeatureSchema& schema, int time_steps);

// Builds the detector when a plausibility section is present.
std::optional<LofDetector> build_detector(const RunConfig& config);

// Threshold-rule models round-trip through JSON so they can ship alongside
// synthesized datasets.
nlohmann::json rule_model_to_json(const ThresholdRuleModel& model);
ThresholdRuleModel rule_model_from_json(const nlohmann::json& doc);

}  // namespace cfe
