#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cfe/series.hpp"

namespace cfe {

// Long-format CSV dataset: header "sample_id,t,f_0,...,f_{D-1}[,label]",
// one row per (sample, time step). Every sample must carry exactly K
// contiguous steps 0..K-1. Reals are written with 17 significant digits so
// a save/load round-trip is exact.

struct SchemaFile {
  FeatureSchema schema;
  int time_steps = 0;
};

void save_schema(const std::string& path, const FeatureSchema& schema, int time_steps);
SchemaFile load_schema(const std::string& path);

void save_dataset(const std::string& path, const std::vector<DatasetEntry>& entries,
                  const FeatureSchema& schema);

// Loads and validates a dataset against its companion schema document.
// Throws ParseError naming the sample id and line on malformed input.
std::pair<SchemaFile, std::vector<DatasetEntry>> load_dataset(
    const std::string& path, const std::string& schema_path);

// Formats a double with 17 significant digits (shortest exact form used
// throughout the CSV writers).
std::string format_real(double value);

}  // namespace cfe
