#include "cfe/run_config.hpp"

#include <fstream>
#include <set>

#include "cfe/dataset_io.hpp"
#include "cfe/errors.hpp"
#include "cfe/external_model.hpp"

namespace cfe {

namespace {

using nlohmann::json;

void require_keys(const json& section, const std::string& name,
                  const std::set<std::string>& allowed) {
  if (!section.is_object()) {
    throw ConfigError("config section '" + name + "' must be an object");
  }
  for (const auto& [key, value] : section.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("config section '" + name + "': unknown key '" + key + "'");
    }
  }
}

SearchConfig parse_search(const json& section) {
  require_keys(section, "search",
               {"lambda", "max_episodes", "max_interventions", "discount",
                "learning_rate", "weight_decay", "seed", "enforce_plausibility"});
  SearchConfig config;
  if (section.contains("lambda")) config.proximity_weight = section["lambda"].get<double>();
  if (section.contains("max_episodes")) config.max_episodes = section["max_episodes"].get<int>();
  if (section.contains("max_interventions")) {
    config.max_interventions = section["max_interventions"].get<int>();
  }
  if (section.contains("discount")) config.discount = section["discount"].get<double>();
  if (section.contains("learning_rate")) {
    config.learning_rate = section["learning_rate"].get<double>();
  }
  if (section.contains("weight_decay")) {
    config.weight_decay = section["weight_decay"].get<double>();
  }
  if (section.contains("seed")) config.seed = section["seed"].get<std::uint64_t>();
  if (section.contains("enforce_plausibility")) {
    config.enforce_plausibility = section["enforce_plausibility"].get<bool>();
  }
  config.validate();
  return config;
}

TargetSpec parse_target(const json& section) {
  require_keys(section, "target", {"mode", "target_class", "lower", "upper"});
  const std::string mode = section.at("mode").get<std::string>();
  if (mode == "classification") {
    if (!section.contains("target_class")) {
      throw ConfigError("classification target needs 'target_class'");
    }
    return TargetSpec::for_class(section["target_class"].get<int>());
  }
  if (mode == "regression") {
    if (!section.contains("lower") || !section.contains("upper")) {
      throw ConfigError("regression target needs 'lower' and 'upper'");
    }
    return TargetSpec::for_range(section["lower"].get<double>(),
                                 section["upper"].get<double>());
  }
  throw ConfigError("target mode must be 'classification' or 'regression'");
}

ConstraintSet parse_constraints(const json& section) {
  require_keys(section, "constraints", {"range_rules", "causal_rules"});
  std::vector<RangeRule> range_rules;
  if (section.contains("range_rules")) {
    for (const json& item : section["range_rules"]) {
      require_keys(item, "constraints.range_rules[]", {"feature", "lo", "hi"});
      range_rules.push_back({item.at("feature").get<int>(), item.at("lo").get<double>(),
                             item.at("hi").get<double>()});
    }
  }
  std::vector<CausalRule> causal_rules;
  if (section.contains("causal_rules")) {
    for (const json& item : section["causal_rules"]) {
      require_keys(item, "constraints.causal_rules[]",
                   {"trigger", "affected", "mode", "value", "alpha", "offset"});
      CausalRule rule;
      rule.trigger_feature = item.at("trigger").get<int>();
      rule.affected_feature = item.at("affected").get<int>();
      const std::string mode = item.at("mode").get<std::string>();
      if (mode == "set") {
        rule.mode = CausalRule::Mode::set;
        rule.value = item.at("value").get<double>();
      } else if (mode == "linear") {
        rule.mode = CausalRule::Mode::linear;
        rule.alpha = item.at("alpha").get<double>();
        rule.offset = item.value("offset", 0.0);
      } else {
        throw ConfigError("causal rule mode must be 'set' or 'linear'");
      }
      causal_rules.push_back(rule);
    }
  }
  return ConstraintSet(std::move(range_rules), std::move(causal_rules));
}

RunConfig::ModelSpec parse_model(const json& section) {
  require_keys(section, "model",
               {"kind", "dataset_id", "variant", "definition", "references",
                "n_neighbors", "command", "timeout_ms"});
  RunConfig::ModelSpec spec;
  spec.kind = section.at("kind").get<std::string>();
  if (spec.kind == "rule") {
    if (section.contains("definition")) {
      spec.definition = section["definition"];
    } else if (section.contains("dataset_id")) {
      spec.dataset_id = section["dataset_id"].get<std::string>();
      spec.variant = section.value("variant", 1);
    } else {
      throw ConfigError("rule model needs 'dataset_id' or an inline 'definition'");
    }
  } else if (spec.kind == "knn") {
    spec.references_path = section.at("references").get<std::string>();
    spec.n_neighbors = section.value("n_neighbors", 0);
  } else if (spec.kind == "external-command") {
    spec.command = section.at("command").get<std::string>();
    spec.timeout_ms = section.value("timeout_ms", 10000);
  } else {
    throw ConfigError("model kind must be 'rule', 'knn' or 'external-command'");
  }
  return spec;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  require_keys(doc, "<root>",
               {"search", "target", "model", "constraints", "data", "plausibility",
                "output"});
  RunConfig config;
  if (doc.contains("search")) config.search = parse_search(doc["search"]);
  config.target = parse_target(doc.at("target"));
  config.model = parse_model(doc.at("model"));
  if (doc.contains("constraints")) {
    config.constraints = parse_constraints(doc["constraints"]);
  }
  if (doc.contains("data")) {
    require_keys(doc["data"], "data", {"schema"});
    config.schema_path = doc["data"].value("schema", "");
  }
  if (doc.contains("plausibility")) {
    const json& section = doc["plausibility"];
    require_keys(section, "plausibility", {"references", "n_neighbors", "threshold"});
    RunConfig::PlausibilitySpec spec;
    spec.references_path = section.at("references").get<std::string>();
    spec.n_neighbors = section.value("n_neighbors", LofDetector::kDefaultNeighbors);
    spec.threshold = section.value("threshold", LofDetector::kDefaultThreshold);
    config.plausibility = std::move(spec);
  }
  if (doc.contains("output")) {
    require_keys(doc["output"], "output", {"report", "metrics"});
    config.output_report = doc["output"].value("report", "");
    config.output_metrics = doc["output"].value("metrics", "");
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return parse_run_config(doc);
}

std::unique_ptr<PredictiveModel> build_model(const RunConfig& config,
                                             const FeatureSchema& schema,
                                             int time_steps) {
  const RunConfig::ModelSpec& spec = config.model;
  if (spec.kind == "rule") {
    if (spec.definition) {
      return std::make_unique<ThresholdRuleModel>(rule_model_from_json(*spec.definition));
    }
    return std::make_unique<ThresholdRuleModel>(build_rule_model(
        spec.dataset_id, spec.variant, time_steps, schema.feature_count()));
  }
  if (spec.kind == "knn") {
    auto [schema_file, entries] = load_dataset(
        spec.references_path, spec.references_path + ".schema.json");
    std::vector<std::pair<SeriesSample, int>> references;
    for (DatasetEntry& entry : entries) {
      if (!entry.label) {
        throw ConfigError("knn references '" + spec.references_path +
                          "' must carry labels");
      }
      references.emplace_back(std::move(entry.sample), *entry.label);
    }
    if (spec.n_neighbors > 0) {
      return std::make_unique<KnnModel>(std::move(references), spec.n_neighbors);
    }
    return std::make_unique<KnnModel>(KnnModel::with_sqrt_neighbors(std::move(references)));
  }
  if (spec.kind == "external-command") {
    return std::make_unique<ExternalCommandModel>(spec.command, spec.timeout_ms);
  }
  throw ConfigError("model kind must be 'rule', 'knn' or 'external-command'");
}

std::optional<LofDetector> build_detector(const RunConfig& config) {
  if (!config.plausibility) return std::nullopt;
  const RunConfig::PlausibilitySpec& spec = *config.plausibility;
  auto [schema_file, entries] =
      load_dataset(spec.references_path, spec.references_path + ".schema.json");
  std::vector<SeriesSample> references;
  references.reserve(entries.size());
  for (DatasetEntry& entry : entries) references.push_back(std::move(entry.sample));
  return LofDetector(references, spec.n_neighbors, spec.threshold);
}

namespace {

std::string comparator_name(Comparator cmp) {
  switch (cmp) {
    case Comparator::greater: return ">";
    case Comparator::less: return "<";
    case Comparator::equal: return "=";
  }
  return ">";
}

Comparator comparator_from_name(const std::string& name) {
  if (name == ">") return Comparator::greater;
  if (name == "<") return Comparator::less;
  if (name == "=") return Comparator::equal;
  throw ConfigError("unknown comparator '" + name + "'");
}

std::string combinator_name(ClauseCombinator c) {
  return c == ClauseCombinator::all ? "all" : "any";
}

ClauseCombinator combinator_from_name(const std::string& name) {
  if (name == "all") return ClauseCombinator::all;
  if (name == "any") return ClauseCombinator::any;
  throw ConfigError("unknown combinator '" + name + "'");
}

}  // namespace

json rule_model_to_json(const ThresholdRuleModel& model) {
  json doc;
  doc["combinator"] = combinator_name(model.combinator());
  json groups = json::array();
  for (const ClauseGroup& group : model.groups()) {
    json clauses = json::array();
    for (const RuleClause& clause : group.clauses) {
      clauses.push_back({{"feature", clause.feature},
                         {"cmp", comparator_name(clause.cmp)},
                         {"threshold", clause.threshold}});
    }
    groups.push_back(
        {{"combinator", combinator_name(group.combinator)}, {"clauses", clauses}});
  }
  doc["groups"] = std::move(groups);
  doc["window_start"] = model.window_start();
  doc["target_label"] = model.target_label();
  doc["fallback_label"] = model.fallback_label();
  return doc;
}

ThresholdRuleModel rule_model_from_json(const json& doc) {
  require_keys(doc, "rule definition",
               {"combinator", "groups", "window_start", "target_label", "fallback_label"});
  std::vector<ClauseGroup> groups;
  for (const json& group_doc : doc.at("groups")) {
    require_keys(group_doc, "rule definition group", {"combinator", "clauses"});
    ClauseGroup group;
    group.combinator = combinator_from_name(group_doc.at("combinator").get<std::string>());
    for (const json& clause_doc : group_doc.at("clauses")) {
      require_keys(clause_doc, "rule clause", {"feature", "cmp", "threshold"});
      group.clauses.push_back({clause_doc.at("feature").get<int>(),
                               comparator_from_name(clause_doc.at("cmp").get<std::string>()),
                               clause_doc.at("threshold").get<double>()});
    }
    groups.push_back(std::move(group));
  }
  return ThresholdRuleModel(combinator_from_name(doc.at("combinator").get<std::string>()),
                            std::move(groups), doc.at("window_start").get<int>(),
                            doc.at("target_label").get<int>(),
                            doc.at("fallback_label").get<int>());
}

}  // namespace cfe
