#include "cfe/dataset_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cfe/errors.hpp"

namespace cfe {

namespace {

using nlohmann::json;

std::string kind_name(FeatureKind kind) {
  return kind == FeatureKind::continuous ? "continuous" : "discrete";
}

FeatureKind kind_from_name(const std::string& name) {
  if (name == "continuous") return FeatureKind::continuous;
  if (name == "discrete") return FeatureKind::discrete;
  throw ParseError("unknown feature kind '" + name + "'");
}

std::string mutability_name(Mutability m) {
  switch (m) {
    case Mutability::actionable: return "actionable";
    case Mutability::non_actionable: return "non_actionable";
    case Mutability::immutable: return "immutable";
  }
  return "actionable";
}

Mutability mutability_from_name(const std::string& name) {
  if (name == "actionable") return Mutability::actionable;
  if (name == "non_actionable") return Mutability::non_actionable;
  if (name == "immutable") return Mutability::immutable;
  throw ParseError("unknown mutability '" + name + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_real(const std::string& text, const std::string& context) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw ParseError(context + ": '" + text + "' is not a number");
  }
  return value;
}

}  // namespace

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void save_schema(const std::string& path, const FeatureSchema& schema, int time_steps) {
  json doc;
  doc["time_steps"] = time_steps;
  json features = json::array();
  for (const FeatureSpec& f : schema.features()) {
    json item;
    item["name"] = f.name;
    item["kind"] = kind_name(f.kind);
    item["mutability"] = mutability_name(f.mutability);
    item["feasibility_weight"] = f.feasibility_weight;
    if (f.kind == FeatureKind::discrete) item["cardinality"] = f.cardinality;
    if (f.range) item["range"] = {f.range->first, f.range->second};
    features.push_back(std::move(item));
  }
  doc["features"] = std::move(features);
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

SchemaFile load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("schema file '" + path + "': " + e.what());
  }
  if (!doc.contains("time_steps") || !doc.contains("features")) {
    throw ParseError("schema file '" + path + "' needs 'time_steps' and 'features'");
  }
  SchemaFile out;
  out.time_steps = doc["time_steps"].get<int>();
  if (out.time_steps < 1) throw ParseError("schema: time_steps must be positive");
  std::vector<FeatureSpec> features;
  for (const json& item : doc["features"]) {
    FeatureSpec f;
    f.name = item.at("name").get<std::string>();
    f.kind = kind_from_name(item.at("kind").get<std::string>());
    if (item.contains("mutability")) {
      f.mutability = mutability_from_name(item["mutability"].get<std::string>());
    }
    if (item.contains("feasibility_weight")) {
      f.feasibility_weight = item["feasibility_weight"].get<double>();
    }
    if (item.contains("cardinality")) f.cardinality = item["cardinality"].get<int>();
    if (item.contains("range")) {
      f.range = std::make_pair(item["range"][0].get<double>(),
                               item["range"][1].get<double>());
    }
    features.push_back(std::move(f));
  }
  out.schema = FeatureSchema(std::move(features));
  return out;
}

void save_dataset(const std::string& path, const std::vector<DatasetEntry>& entries,
                  const FeatureSchema& schema) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  const bool with_labels =
      !entries.empty() && entries.front().label.has_value();
  out << "sample_id,t";
  for (int d = 0; d < schema.feature_count(); ++d) out << ",f_" << d;
  if (with_labels) out << ",label";
  out << "\n";
  for (const DatasetEntry& entry : entries) {
    for (int k = 0; k < entry.sample.time_steps(); ++k) {
      out << entry.id << "," << k;
      for (int d = 0; d < entry.sample.feature_count(); ++d) {
        out << "," << format_real(entry.sample.values(k, d));
      }
      if (with_labels) out << "," << *entry.label;
      out << "\n";
    }
  }
}

std::pair<SchemaFile, std::vector<DatasetEntry>> load_dataset(
    const std::string& path, const std::string& schema_path) {
  SchemaFile schema_file = load_schema(schema_path);
  const FeatureSchema& schema = schema_file.schema;
  const int K = schema_file.time_steps;
  const int D = schema.feature_count();

  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    return {std::move(schema_file), {}};  // empty file: no samples
  }
  const std::vector<std::string> header = split_csv_line(line);
  const bool with_labels = !header.empty() && header.back() == "label";
  const int expected_columns = 2 + D + (with_labels ? 1 : 0);
  if (static_cast<int>(header.size()) != expected_columns || header[0] != "sample_id" ||
      header[1] != "t") {
    throw ParseError("dataset '" + path + "': header does not match schema (expected " +
                     std::to_string(expected_columns) + " columns)");
  }

  struct Partial {
    SeriesSample sample;
    std::optional<int> label;
    int next_step = 0;
    int order = 0;
  };
  std::map<std::string, Partial> partials;
  std::vector<std::string> id_order;

  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string context = "dataset '" + path + "' line " + std::to_string(line_number);
    if (static_cast<int>(fields.size()) != expected_columns) {
      throw ParseError(context + ": expected " + std::to_string(expected_columns) +
                       " fields, got " + std::to_string(fields.size()));
    }
    const std::string& id = fields[0];
    Partial& partial = partials[id];
    if (partial.next_step == 0 && partial.sample.values.size() == 0) {
      partial.sample.values = Eigen::MatrixXd::Zero(K, D);
      partial.order = static_cast<int>(id_order.size());
      id_order.push_back(id);
    }
    const double t_value = parse_real(fields[1], context + " (sample '" + id + "')");
    const int t = static_cast<int>(t_value);
    if (t != partial.next_step || t >= K) {
      throw ParseError(context + ": sample '" + id + "' expected step " +
                       std::to_string(partial.next_step) + " of " + std::to_string(K) +
                       ", got " + fields[1]);
    }
    for (int d = 0; d < D; ++d) {
      partial.sample.values(t, d) =
          parse_real(fields[static_cast<size_t>(2 + d)],
                     context + " (sample '" + id + "', feature " + std::to_string(d) + ")");
    }
    if (with_labels) {
      partial.label = static_cast<int>(
          parse_real(fields.back(), context + " (sample '" + id + "', label)"));
    }
    ++partial.next_step;
  }

  std::vector<DatasetEntry> entries(id_order.size());
  for (auto& [id, partial] : partials) {
    if (partial.next_step != K) {
      throw ParseError("dataset '" + path + "': sample '" + id + "' has " +
                       std::to_string(partial.next_step) + " steps, schema requires " +
                       std::to_string(K));
    }
    try {
      validate_sample(partial.sample, schema);
    } catch (const SchemaError& e) {
      throw ParseError("dataset '" + path + "': sample '" + id + "': " + e.what());
    }
    DatasetEntry entry;
    entry.id = id;
    entry.sample = std::move(partial.sample);
    entry.label = partial.label;
    entries[static_cast<size_t>(partial.order)] = std::move(entry);
  }
  return {std::move(schema_file), std::move(entries)};
}

}  // namespace cfe
