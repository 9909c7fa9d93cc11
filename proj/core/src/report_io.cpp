#include "cfe/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cfe/errors.hpp"

namespace cfe {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& values) {
  json rows = json::array();
  for (Eigen::Index k = 0; k < values.rows(); ++k) {
    json row = json::array();
    for (Eigen::Index d = 0; d < values.cols(); ++d) row.push_back(values(k, d));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const int K = static_cast<int>(rows.size());
  const int D = K > 0 ? static_cast<int>(rows[0].size()) : 0;
  Eigen::MatrixXd values(K, D);
  for (int k = 0; k < K; ++k) {
    for (int d = 0; d < D; ++d) values(k, d) = rows[static_cast<size_t>(k)][static_cast<size_t>(d)].get<double>();
  }
  return values;
}

json summary_to_json(const MetricsSummary& summary) {
  json doc;
  doc["n_invalid"] = summary.n_invalid;
  doc["n_inv_val"] = summary.n_inv_val;
  doc["n_cfe"] = summary.n_cfe;
  doc["n_val"] = summary.n_val;
  doc["n_plau_val"] = summary.n_plau_val;
  if (summary.success_rate) doc["success_rate"] = *summary.success_rate;
  if (summary.validity_rate) doc["validity_rate"] = *summary.validity_rate;
  if (summary.plausibility_rate) doc["plausibility_rate"] = *summary.plausibility_rate;
  if (summary.mean_proximity) doc["mean_proximity"] = *summary.mean_proximity;
  if (summary.mean_sparsity) doc["mean_sparsity"] = *summary.mean_sparsity;
  return doc;
}

std::string cell(const std::optional<double>& rate) {
  if (!rate) return "---";
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << *rate;
  std::string text = out.str();
  while (!text.empty() && text.back() == '0') text.pop_back();
  if (!text.empty() && text.back() == '.') text.pop_back();
  return text;
}

}  // namespace

json search_report_to_json(const SearchReport& report) {
  json doc;
  doc["succeeded"] = report.succeeded;
  doc["episodes_run"] = report.episodes_run;
  if (report.best_proximity) doc["best_proximity"] = *report.best_proximity;
  if (report.best) doc["best"] = matrix_to_json(report.best->values);
  json set = json::array();
  for (const SeriesSample& sample : report.cfe_set) set.push_back(matrix_to_json(sample.values));
  doc["cfe_set"] = std::move(set);
  json episodes = json::array();
  for (const EpisodeRecord& episode : report.episodes) {
    episodes.push_back({{"interventions", episode.interventions},
                        {"reward_sum", episode.reward_sum},
                        {"found", episode.found},
                        {"rejected_implausible", episode.rejected_implausible},
                        {"discarded", episode.discarded}});
  }
  doc["episodes"] = std::move(episodes);
  return doc;
}

SearchReport search_report_from_json(const json& doc) {
  SearchReport report;
  report.succeeded = doc.at("succeeded").get<bool>();
  report.episodes_run = doc.at("episodes_run").get<int>();
  if (doc.contains("best_proximity")) report.best_proximity = doc["best_proximity"].get<double>();
  if (doc.contains("best")) report.best = SeriesSample(matrix_from_json(doc["best"]));
  for (const json& sample : doc.at("cfe_set")) {
    report.cfe_set.emplace_back(matrix_from_json(sample));
  }
  for (const json& episode : doc.at("episodes")) {
    report.episodes.push_back({episode.at("interventions").get<int>(),
                               episode.at("reward_sum").get<double>(),
                               episode.at("found").get<bool>(),
                               episode.at("rejected_implausible").get<bool>(),
                               episode.at("discarded").get<bool>()});
  }
  return report;
}

json metrics_to_json(const BatchResult& batch) {
  json doc;
  doc["summary"] = summary_to_json(batch.summary);
  doc["skipped_already_valid"] = batch.skipped_already_valid;
  json samples = json::array();
  for (const SampleResult& result : batch.results) {
    json item;
    item["id"] = result.id;
    item["succeeded"] = result.report.succeeded;
    item["episodes"] = result.episodes;
    if (result.report.succeeded) {
      item["proximity"] = result.proximity;
      item["sparsity"] = result.sparsity;
      item["plausible"] = result.plausible;
      item["best_proximity"] = *result.report.best_proximity;
    }
    item["cfe_count"] = result.report.cfe_set.size();
    samples.push_back(std::move(item));
  }
  doc["samples"] = std::move(samples);
  return doc;
}

json comparison_to_json(const PlausibilityComparison& comparison) {
  json doc;
  doc["ungated"] = metrics_to_json(comparison.ungated);
  doc["gated"] = metrics_to_json(comparison.gated);
  json deltas;
  auto delta = [](const std::optional<double>& a, const std::optional<double>& b) -> json {
    if (a && b) return *b - *a;
    return nullptr;
  };
  deltas["success_rate"] =
      delta(comparison.ungated.summary.success_rate, comparison.gated.summary.success_rate);
  deltas["mean_proximity"] =
      delta(comparison.ungated.summary.mean_proximity, comparison.gated.summary.mean_proximity);
  deltas["mean_sparsity"] =
      delta(comparison.ungated.summary.mean_sparsity, comparison.gated.summary.mean_sparsity);
  doc["deltas"] = std::move(deltas);
  return doc;
}

std::string metrics_table(const std::vector<std::pair<std::string, BatchResult>>& rows,
                          bool with_timing) {
  std::ostringstream out;
  out << std::left << std::setw(18) << "Run" << std::right << std::setw(10) << "N"
      << std::setw(12) << "Success" << std::setw(12) << "Validity" << std::setw(14)
      << "Plausibility" << std::setw(12) << "Proximity" << std::setw(12) << "Sparsity";
  if (with_timing) out << std::setw(14) << "Mean ms";
  out << "\n";
  out << std::string(with_timing ? 104 : 90, '-') << "\n";
  for (const auto& [label, batch] : rows) {
    const MetricsSummary& m = batch.summary;
    out << std::left << std::setw(18) << label << std::right << std::setw(10)
        << m.n_invalid << std::setw(12) << cell(m.success_rate) << std::setw(12)
        << cell(m.validity_rate) << std::setw(14) << cell(m.plausibility_rate)
        << std::setw(12) << cell(m.mean_proximity) << std::setw(12)
        << cell(m.mean_sparsity);
    if (with_timing) {
      double total_ms = 0.0;
      for (const SampleResult& r : batch.results) total_ms += r.wall_ms;
      std::optional<double> mean_ms;
      if (!batch.results.empty()) mean_ms = total_ms / batch.results.size();
      out << std::setw(14) << cell(mean_ms);
    }
    out << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << content;
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("file '" + path + "': " + e.what());
  }
  return doc;
}

}  // namespace cfe
