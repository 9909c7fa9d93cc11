#pragma once

#include <string>

#include <json.hpp>

#include "cfe/eval.hpp"
#include "cfe/search.hpp"

namespace cfe {

// Serialized reports are deterministic: same search, same bytes. Wall-clock
// timings therefore only appear in the text table, never in the JSON.

nlohmann::json search_report_to_json(const SearchReport& report);
SearchReport search_report_from_json(const nlohmann::json& doc);

nlohmann::json metrics_to_json(const BatchResult& batch);
nlohmann::json comparison_to_json(const PlausibilityComparison& comparison);

// Fixed-width table with the five metric columns; one row per label.
std::string metrics_table(const std::vector<std::pair<std::string, BatchResult>>& rows,
                          bool with_timing = true);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::string& path);

}  // namespace cfe
