#pragma once

#include <span>
#include <vector>

#include "cfe/rng.hpp"
#include "cfe/series.hpp"

namespace cfe {

// The sampled intervention: which time step, which actionable-feature slot,
// and the strength (continuous delta) or category code (discrete value).
struct ActionTriple {
  int time_step = 0;     // a1, in [0, K)
  int feature_slot = 0;  // a2, index into FeatureSchema::actionable()
  double value = 0.0;    // a3
};

// Outputs of one forward pass: categorical heads are probability simplexes,
// the Gaussian head is (mean, stddev) per actionable continuous feature, and
// value_probs concatenates one simplex per actionable discrete feature.
struct DistributionParams {
  Eigen::VectorXd time_probs;     // size K
  Eigen::VectorXd feature_probs;  // size |A|
  Eigen::VectorXd mean;           // size DC
  Eigen::VectorXd stddev;         // size DC, strictly positive
  Eigen::VectorXd value_probs;    // size V = sum of discrete cardinalities
};

// Weights of the two-hidden-layer policy network and its four output heads.
// Also reused as the gradient container (same shapes).
struct PolicyParams {
  Eigen::MatrixXd w1;       // hidden1 x (K*D)
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;       // hidden2 x hidden1
  Eigen::VectorXd b2;
  Eigen::MatrixXd w_time;   // K x hidden2
  Eigen::VectorXd b_time;
  Eigen::MatrixXd w_feat;   // |A| x hidden2
  Eigen::VectorXd b_feat;
  Eigen::MatrixXd w_mean;   // DC x hidden2
  Eigen::VectorXd b_mean;
  Eigen::MatrixXd w_std;    // DC x hidden2
  Eigen::VectorXd b_std;
  Eigen::MatrixXd w_value;  // V x hidden2
  Eigen::VectorXd b_value;

  bool all_finite() const;
  static PolicyParams zeros_like(const PolicyParams& shape);
};

// Applies fn to every parameter tensor, in the documented serialization
// order (w1, b1, w2, b2, then the heads: time, feature, mean, std, value).
template <class Params, class Fn>
void for_each_tensor(Params& p, Fn&& fn) {
  fn(p.w1); fn(p.b1);
  fn(p.w2); fn(p.b2);
  fn(p.w_time); fn(p.b_time);
  fn(p.w_feat); fn(p.b_feat);
  fn(p.w_mean); fn(p.b_mean);
  fn(p.w_std); fn(p.b_std);
  fn(p.w_value); fn(p.b_value);
}

template <class ParamsA, class ParamsB, class Fn>
void zip_tensors(ParamsA& a, ParamsB& b, Fn&& fn) {
  fn(a.w1, b.w1); fn(a.b1, b.b1);
  fn(a.w2, b.w2); fn(a.b2, b.b2);
  fn(a.w_time, b.w_time); fn(a.b_time, b.b_time);
  fn(a.w_feat, b.w_feat); fn(a.b_feat, b.b_feat);
  fn(a.w_mean, b.w_mean); fn(a.b_mean, b.b_mean);
  fn(a.w_std, b.w_std); fn(a.b_std, b.b_std);
  fn(a.w_value, b.w_value); fn(a.b_value, b.b_value);
}

// How action components map onto schema features. Derived once per search.
struct ActionLayout {
  int time_steps = 0;                // K
  int input_dim = 0;                 // K * D
  std::vector<int> actionable;       // slot -> global feature index
  std::vector<int> continuous_slot;  // slot -> Gaussian-head index, or -1
  std::vector<int> segment_offset;   // slot -> offset into value head, or -1
  std::vector<int> segment_size;     // slot -> cardinality, or 0
  int continuous_count = 0;          // DC
  int value_dim = 0;                 // V

  static ActionLayout from_schema(const FeatureSchema& schema, int time_steps);
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam over the policy parameter tensors; step() takes a minimization
// gradient.
class AdamOptimizer {
 public:
  AdamOptimizer(const PolicyParams& shape, AdamConfig config);

  void step(PolicyParams& params, const PolicyParams& grad);
  int step_count() const { return step_count_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  PolicyParams first_moment_;
  PolicyParams second_moment_;
  int step_count_ = 0;
};

// One recorded intervention: the state the action was sampled from, the
// action, and the reward observed after it.
struct TimeStep {
  SeriesSample state;
  ActionTriple action;
  double reward = 0.0;
};

// Policy network: two ReLU hidden layers feeding a time head, a feature
// head, a Gaussian strength head and a per-discrete-feature value head.
class PolicyNetwork {
 public:
  static constexpr int kDefaultHidden1 = 1000;
  static constexpr int kDefaultHidden2 = 100;
  static constexpr double kStddevFloor = 1e-4;

  PolicyNetwork(ActionLayout layout, int hidden1 = kDefaultHidden1,
                int hidden2 = kDefaultHidden2);

  // He-uniform weights (fan-in scaled), zero biases. Consumes rng in the
  // serialization order of the tensors.
  void init_weights(Rng& rng);

  DistributionParams forward(const SeriesSample& state) const;
  ActionTriple sample_action(const DistributionParams& dist, Rng& rng) const;

  // ln p1[a1] + ln p2[a2] + ln(density or mass of a3). Returns -infinity
  // for zero-probability actions.
  double log_prob(const DistributionParams& dist, const ActionTriple& action) const;

  // Exact reverse-mode gradient of log_prob with respect to every parameter.
  PolicyParams grad_log_prob(const SeriesSample& state, const ActionTriple& action) const;

  const ActionLayout& layout() const { return layout_; }
  int hidden1() const { return hidden1_; }
  int hidden2() const { return hidden2_; }

  PolicyParams params;

 private:
  ActionLayout layout_;
  int hidden1_;
  int hidden2_;
};

// REINFORCE over one recorded episode: for each step t (in order) computes
// the discounted tail return G_t and applies one Adam step on the loss
// -gamma^t * G_t * ln pi(a_t | x_t). Steps whose coefficient is exactly
// zero are skipped. On non-finite parameters the pre-update parameters are
// restored and NumericError is thrown.
void reinforce_update(PolicyNetwork& policy, AdamOptimizer& optimizer,
                      std::span<const TimeStep> trajectory, double discount);

// Discounted tail returns G_t for a reward sequence (reward[t] = R_{t+1}).
std::vector<double> discounted_returns(std::span<const double> rewards, double discount);

Eigen::VectorXd flatten_state(const SeriesSample& state);

}  // namespace cfe
