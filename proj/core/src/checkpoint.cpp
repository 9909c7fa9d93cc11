#include "cfe/checkpoint.hpp"

#include <fstream>

#include "cfe/errors.hpp"

namespace cfe {

namespace {

using nlohmann::json;

const char* const kTensorNames[] = {"w1",     "b1",     "w2",    "b2",    "w_time",
                                    "b_time", "w_feat", "b_feat", "w_mean", "b_mean",
                                    "w_std",  "b_std",  "w_value", "b_value"};

}  // namespace

json policy_to_json(const PolicyNetwork& policy) {
  json doc;
  doc["input_dim"] = policy.layout().input_dim;
  doc["time_steps"] = policy.layout().time_steps;
  doc["hidden1"] = policy.hidden1();
  doc["hidden2"] = policy.hidden2();
  json tensors;
  int index = 0;
  for_each_tensor(policy.params, [&](const auto& t) {
    json flat = json::array();
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index j = 0; j < t.cols(); ++j) flat.push_back(t(i, j));
    }
    tensors[kTensorNames[index]] = {{"rows", t.rows()}, {"cols", t.cols()},
                                    {"data", std::move(flat)}};
    ++index;
  });
  doc["tensors"] = std::move(tensors);
  return doc;
}

void policy_from_json(const json& doc, PolicyNetwork& policy) {
  if (doc.at("input_dim").get<int>() != policy.layout().input_dim ||
      doc.at("hidden1").get<int>() != policy.hidden1() ||
      doc.at("hidden2").get<int>() != policy.hidden2()) {
    throw DimensionError("checkpoint dimensions do not match the policy network");
  }
  const json& tensors = doc.at("tensors");
  int index = 0;
  for_each_tensor(policy.params, [&](auto& t) {
    const json& entry = tensors.at(kTensorNames[index]);
    if (entry.at("rows").get<Eigen::Index>() != t.rows() ||
        entry.at("cols").get<Eigen::Index>() != t.cols()) {
      throw DimensionError(std::string("checkpoint tensor '") + kTensorNames[index] +
                           "' has the wrong shape");
    }
    const json& data = entry.at("data");
    size_t flat = 0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index j = 0; j < t.cols(); ++j) t(i, j) = data[flat++].get<double>();
    }
    ++index;
  });
}

void save_policy(const std::string& path, const PolicyNetwork& policy) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << policy_to_json(policy).dump() << "\n";
}

void load_policy(const std::string& path, PolicyNetwork& policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what());
  }
  policy_from_json(doc, policy);
}

}  // namespace cfe
