#include "cfe/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "cfe/errors.hpp"

namespace cfe {

namespace {

bool clause_holds(const RuleClause& clause, double v) {
  switch (clause.cmp) {
    case Comparator::greater: return v > clause.threshold;
    case Comparator::less: return v < clause.threshold;
    case Comparator::equal: return v == clause.threshold;
  }
  return false;
}

bool group_holds(const ClauseGroup& group, const SeriesSample& sample, int k) {
  if (group.combinator == ClauseCombinator::all) {
    return std::all_of(group.clauses.begin(), group.clauses.end(),
                       [&](const RuleClause& c) {
                         return clause_holds(c, sample.values(k, c.feature));
                       });
  }
  return std::any_of(group.clauses.begin(), group.clauses.end(),
                     [&](const RuleClause& c) {
                       return clause_holds(c, sample.values(k, c.feature));
                     });
}

Eigen::VectorXd flatten_row_major(const SeriesSample& sample) {
  const int steps = sample.time_steps();
  const int width = sample.feature_count();
  Eigen::VectorXd flat(steps * width);
  for (int k = 0; k < steps; ++k) {
    for (int d = 0; d < width; ++d) {
      flat[k * width + d] = sample.values(k, d);
    }
  }
  return flat;
}

}  // namespace

ThresholdRuleModel::ThresholdRuleModel(ClauseCombinator combinator,
                                       std::vector<ClauseGroup> groups, int window_start,
                                       int target_label, int fallback_label)
    : combinator_(combinator),
      groups_(std::move(groups)),
      window_start_(window_start),
      target_label_(target_label),
      fallback_label_(fallback_label) {
  if (groups_.empty() ||
      std::any_of(groups_.begin(), groups_.end(),
                  [](const ClauseGroup& g) { return g.clauses.empty(); })) {
    throw SchemaError("rule model needs at least one clause per group");
  }
  if (window_start_ < 0) {
    throw SchemaError("rule model window start must be non-negative");
  }
}

ThresholdRuleModel ThresholdRuleModel::flat(ClauseCombinator combinator,
                                            std::vector<RuleClause> clauses,
                                            int window_start, int target_label,
                                            int fallback_label) {
  std::vector<ClauseGroup> groups;
  groups.reserve(clauses.size());
  for (const RuleClause& clause : clauses) {
    groups.push_back({ClauseCombinator::any, {clause}});
  }
  return ThresholdRuleModel(combinator, std::move(groups), window_start, target_label,
                            fallback_label);
}

std::vector<RuleClause> ThresholdRuleModel::flattened_clauses() const {
  std::vector<RuleClause> out;
  for (const ClauseGroup& group : groups_) {
    out.insert(out.end(), group.clauses.begin(), group.clauses.end());
  }
  return out;
}

bool ThresholdRuleModel::holds_at(const SeriesSample& sample, int k) const {
  if (combinator_ == ClauseCombinator::all) {
    return std::all_of(groups_.begin(), groups_.end(),
                       [&](const ClauseGroup& g) { return group_holds(g, sample, k); });
  }
  return std::any_of(groups_.begin(), groups_.end(),
                     [&](const ClauseGroup& g) { return group_holds(g, sample, k); });
}

double ThresholdRuleModel::predict(const SeriesSample& sample) const {
  for (const ClauseGroup& group : groups_) {
    for (const RuleClause& clause : group.clauses) {
      if (clause.feature < 0 || clause.feature >= sample.feature_count()) {
        throw SchemaError("rule clause references feature " +
                          std::to_string(clause.feature) + " outside 0.." +
                          std::to_string(sample.feature_count() - 1));
      }
    }
  }
  if (window_start_ >= sample.time_steps()) {
    throw SchemaError("rule window starts at step " + std::to_string(window_start_) +
                      " but sample has only " + std::to_string(sample.time_steps()) +
                      " steps");
  }
  for (int k = window_start_; k < sample.time_steps(); ++k) {
    if (!holds_at(sample, k)) return static_cast<double>(fallback_label_);
  }
  return static_cast<double>(target_label_);
}

KnnModel::KnnModel(std::vector<std::pair<SeriesSample, int>> references, int n_neighbors)
    : n_neighbors_(n_neighbors) {
  if (references.empty()) {
    throw StateError("knn model needs a non-empty reference set");
  }
  if (n_neighbors_ < 1 || n_neighbors_ > static_cast<int>(references.size())) {
    throw ConfigError("knn n_neighbors must be in [1, #references]");
  }
  rows_ = references.front().first.time_steps();
  cols_ = references.front().first.feature_count();
  reference_matrix_.resize(static_cast<int>(references.size()), rows_ * cols_);
  labels_.reserve(references.size());
  for (size_t i = 0; i < references.size(); ++i) {
    require_same_shape(references[i].first, references.front().first);
    reference_matrix_.row(static_cast<int>(i)) = flatten_row_major(references[i].first);
    labels_.push_back(references[i].second);
  }
}

KnnModel KnnModel::with_sqrt_neighbors(std::vector<std::pair<SeriesSample, int>> references) {
  const int n = std::max(1, static_cast<int>(std::floor(std::sqrt(
                                static_cast<double>(references.size())))));
  return KnnModel(std::move(references), n);
}

double KnnModel::predict(const SeriesSample& sample) const {
  if (sample.time_steps() != rows_ || sample.feature_count() != cols_) {
    throw DimensionError("knn query shape does not match reference shape");
  }
  const Eigen::VectorXd query = flatten_row_major(sample);
  const Eigen::VectorXd dists =
      (reference_matrix_.rowwise() - query.transpose()).rowwise().norm();

  std::vector<int> order(labels_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return dists[a] < dists[b]; });

  std::map<int, int> votes;
  for (int i = 0; i < n_neighbors_; ++i) {
    ++votes[labels_[static_cast<size_t>(order[static_cast<size_t>(i)])]];
  }
  int best_label = votes.begin()->first;
  int best_count = votes.begin()->second;
  for (const auto& [label, count] : votes) {
    if (count > best_count) {  // map iterates labels ascending, so ties keep the smallest
      best_label = label;
      best_count = count;
    }
  }
  return static_cast<double>(best_label);
}

namespace {

struct CatalogEntry {
  DatasetInfo info;
  // Clause features are global 0-based indices.
  std::vector<RuleClause> rule_clauses;  // shared by both variants unless nested
  bool nested_life_expectancy = false;
};

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {{"life_expectancy", 16, 14, 5}, {}, true},
      {{"pems_sf", 144, 963, 51},
       {{0, Comparator::greater, 0.0},
        {99, Comparator::greater, 0.0},
        {299, Comparator::greater, 0.0}},
       false},
      {{"natops", 51, 24, 10},
       {{0, Comparator::greater, 0.0}, {1, Comparator::greater, 0.0}},
       false},
      {{"heartbeat", 405, 61, 5},
       {{0, Comparator::greater, 0.0},
        {1, Comparator::greater, 0.0},
        {2, Comparator::greater, 0.0}},
       false},
      {{"racket_sports", 30, 6, 5},
       {{0, Comparator::greater, 0.0}, {4, Comparator::greater, 0.0}},
       false},
      {{"basic_motions", 100, 6, 10},
       {{0, Comparator::greater, 0.0},
        {2, Comparator::greater, 0.0},
        {5, Comparator::greater, 0.0}},
       false},
      {{"ering", 65, 4, 10},
       {{1, Comparator::greater, 0.0}, {2, Comparator::greater, 0.0}},
       false},
      {{"japanese_vowels", 29, 12, 20},
       {{0, Comparator::greater, 0.0},
        {5, Comparator::greater, 0.0},
        {11, Comparator::greater, 0.0}},
       false},
      {{"libras", 45, 2, 20},
       {{0, Comparator::greater, 0.0}, {1, Comparator::greater, 0.0}},
       false},
  };
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& dataset_id) {
  for (const CatalogEntry& entry : catalog()) {
    if (entry.info.id == dataset_id) return entry;
  }
  throw ConfigError("unknown dataset id '" + dataset_id + "'");
}

// life_expectancy feature order (country name and year already dropped):
// 0 continent, 1 least_developed, 2 population, 3 co2_emissions,
// 4 health_expenditure, 5 electric_power_consumption, 6 forest_area,
// 7 gdp_per_capita, 8 internet_usage, 9 military_expenditure,
// 10 open_defecation, 11 basic_drinking_water, 12 adult_obesity,
// 13 beer_consumption.
constexpr int kLeastDeveloped = 1;
constexpr int kHealthExpenditure = 4;
constexpr int kGdpPerCapita = 7;
constexpr int kOpenDefecation = 10;
constexpr int kDrinkingWater = 11;

ThresholdRuleModel life_expectancy_rule(int variant, int window_start) {
  std::vector<ClauseGroup> groups;
  groups.push_back({ClauseCombinator::any, {{kLeastDeveloped, Comparator::equal, 0.0}}});
  if (variant == 1) {
    groups.push_back({ClauseCombinator::any, {{kGdpPerCapita, Comparator::greater, 0.0}}});
    groups.push_back(
        {ClauseCombinator::any, {{kHealthExpenditure, Comparator::greater, 0.0}}});
  } else {
    groups.push_back({ClauseCombinator::any,
                      {{kGdpPerCapita, Comparator::greater, 0.0},
                       {kHealthExpenditure, Comparator::greater, 0.0}}});
  }
  groups.push_back({ClauseCombinator::any, {{kDrinkingWater, Comparator::greater, 0.0}}});
  groups.push_back({ClauseCombinator::any, {{kOpenDefecation, Comparator::less, 0.0}}});
  return ThresholdRuleModel(ClauseCombinator::all, std::move(groups), window_start, 1, 0);
}

}  // namespace

const DatasetInfo& dataset_info(const std::string& dataset_id) {
  return catalog_entry(dataset_id).info;
}

std::vector<std::string> dataset_ids() {
  std::vector<std::string> ids;
  for (const CatalogEntry& entry : catalog()) ids.push_back(entry.info.id);
  return ids;
}

FeatureSchema dataset_schema(const std::string& dataset_id) {
  const CatalogEntry& entry = catalog_entry(dataset_id);
  std::vector<FeatureSpec> features;
  if (entry.nested_life_expectancy) {
    const std::vector<std::string> names = {
        "continent",       "least_developed", "population",
        "co2_emissions",   "health_expenditure", "electric_power_consumption",
        "forest_area",     "gdp_per_capita",  "internet_usage",
        "military_expenditure", "open_defecation", "basic_drinking_water",
        "adult_obesity",   "beer_consumption"};
    for (size_t d = 0; d < names.size(); ++d) {
      FeatureSpec f;
      f.name = names[d];
      if (d == 0) {
        f.kind = FeatureKind::discrete;
        f.cardinality = 6;
      } else if (d == 1) {
        f.kind = FeatureKind::discrete;
        f.cardinality = 2;
      }
      features.push_back(std::move(f));
    }
  } else {
    for (int d = 0; d < entry.info.feature_count; ++d) {
      FeatureSpec f;
      f.name = "f_" + std::to_string(d);
      features.push_back(std::move(f));
    }
  }
  return FeatureSchema(std::move(features));
}

ThresholdRuleModel build_rule_model(const std::string& dataset_id, int variant, int K,
                                    int D) {
  if (variant != 1 && variant != 2) {
    throw ConfigError("rule model variant must be 1 or 2");
  }
  const CatalogEntry& entry = catalog_entry(dataset_id);
  if (K < entry.info.rule_window) {
    throw SchemaError("dataset '" + dataset_id + "': K=" + std::to_string(K) +
                      " is shorter than the rule window of " +
                      std::to_string(entry.info.rule_window));
  }
  const int window_start = K - entry.info.rule_window;
  if (entry.nested_life_expectancy) {
    if (D <= kDrinkingWater) {
      throw SchemaError("life_expectancy rules need at least 12 features");
    }
    return life_expectancy_rule(variant, window_start);
  }
  for (const RuleClause& clause : entry.rule_clauses) {
    if (clause.feature >= D) {
      throw SchemaError("dataset '" + dataset_id + "': rule feature " +
                        std::to_string(clause.feature) + " needs D > " +
                        std::to_string(clause.feature));
    }
  }
  const ClauseCombinator combinator =
      variant == 1 ? ClauseCombinator::all : ClauseCombinator::any;
  return ThresholdRuleModel::flat(combinator, entry.rule_clauses, window_start, 1, 0);
}

}  // namespace cfe
