#pragma once

#include <string>

#include <json.hpp>

#include "cfe/policy.hpp"

namespace cfe {

// Policy checkpoint: dimensions plus every parameter tensor as a flat
// row-major array, in the fixed order w1, b1, w2, b2, w_time, b_time,
// w_feat, b_feat, w_mean, b_mean, w_std, b_std, w_value, b_value.
nlohmann::json policy_to_json(const PolicyNetwork& policy);

// Restores parameters into an identically shaped network; throws
// DimensionError on a shape mismatch.
void policy_from_json(const nlohmann::json& doc, PolicyNetwork& policy);

void save_policy(const std::string& path, const PolicyNetwork& policy);
void load_policy(const std::string& path, PolicyNetwork& policy);

}  // namespace cfe
