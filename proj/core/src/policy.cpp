#include "cfe/policy.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "cfe/errors.hpp"

namespace cfe {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;  // ln(2*pi)
constexpr double kNegInfinity = -std::numeric_limits<double>::infinity();

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double peak = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - peak).exp();
  return p / p.sum();
}

double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double logistic(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInfinity; }

}  // namespace

Eigen::VectorXd flatten_state(const SeriesSample& state) {
  const int steps = state.time_steps();
  const int width = state.feature_count();
  Eigen::VectorXd flat(steps * width);
  for (int k = 0; k < steps; ++k) {
    for (int d = 0; d < width; ++d) {
      flat[k * width + d] = state.values(k, d);
    }
  }
  return flat;
}

bool PolicyParams::all_finite() const {
  bool finite = true;
  for_each_tensor(*this, [&](const auto& t) { finite = finite && t.allFinite(); });
  return finite;
}

PolicyParams PolicyParams::zeros_like(const PolicyParams& shape) {
  PolicyParams out = shape;
  for_each_tensor(out, [](auto& t) { t.setZero(); });
  return out;
}

ActionLayout ActionLayout::from_schema(const FeatureSchema& schema, int time_steps) {
  if (time_steps < 1) {
    throw DimensionError("action layout needs at least one time step");
  }
  ActionLayout layout;
  layout.time_steps = time_steps;
  layout.input_dim = time_steps * schema.feature_count();
  layout.actionable = schema.actionable();
  int dc = 0;
  int value_offset = 0;
  for (int d : layout.actionable) {
    if (schema.is_discrete(d)) {
      layout.continuous_slot.push_back(-1);
      layout.segment_offset.push_back(value_offset);
      layout.segment_size.push_back(schema.feature(d).cardinality);
      value_offset += schema.feature(d).cardinality;
    } else {
      layout.continuous_slot.push_back(dc++);
      layout.segment_offset.push_back(-1);
      layout.segment_size.push_back(0);
    }
  }
  layout.continuous_count = dc;
  layout.value_dim = value_offset;
  return layout;
}

AdamOptimizer::AdamOptimizer(const PolicyParams& shape, AdamConfig config)
    : config_(config),
      first_moment_(PolicyParams::zeros_like(shape)),
      second_moment_(PolicyParams::zeros_like(shape)) {}

void AdamOptimizer::step(PolicyParams& params, const PolicyParams& grad) {
  ++step_count_;
  const double bias1 = 1.0 - std::pow(config_.beta1, step_count_);
  const double bias2 = 1.0 - std::pow(config_.beta2, step_count_);

  auto update = [&](auto& theta, auto& m, auto& v, const auto& g_in) {
    const auto g = (g_in + config_.weight_decay * theta).eval();
    m = config_.beta1 * m + (1.0 - config_.beta1) * g;
    v = (config_.beta2 * v.array() + (1.0 - config_.beta2) * g.array().square()).matrix();
    theta.array() -=
        config_.learning_rate * (m.array() / bias1) /
        ((v.array() / bias2).sqrt() + config_.epsilon);
  };

  update(params.w1, first_moment_.w1, second_moment_.w1, grad.w1);
  update(params.b1, first_moment_.b1, second_moment_.b1, grad.b1);
  update(params.w2, first_moment_.w2, second_moment_.w2, grad.w2);
  update(params.b2, first_moment_.b2, second_moment_.b2, grad.b2);
  update(params.w_time, first_moment_.w_time, second_moment_.w_time, grad.w_time);
  update(params.b_time, first_moment_.b_time, second_moment_.b_time, grad.b_time);
  update(params.w_feat, first_moment_.w_feat, second_moment_.w_feat, grad.w_feat);
  update(params.b_feat, first_moment_.b_feat, second_moment_.b_feat, grad.b_feat);
  update(params.w_mean, first_moment_.w_mean, second_moment_.w_mean, grad.w_mean);
  update(params.b_mean, first_moment_.b_mean, second_moment_.b_mean, grad.b_mean);
  update(params.w_std, first_moment_.w_std, second_moment_.w_std, grad.w_std);
  update(params.b_std, first_moment_.b_std, second_moment_.b_std, grad.b_std);
  update(params.w_value, first_moment_.w_value, second_moment_.w_value, grad.w_value);
  update(params.b_value, first_moment_.b_value, second_moment_.b_value, grad.b_value);
}

PolicyNetwork::PolicyNetwork(ActionLayout layout, int hidden1, int hidden2)
    : layout_(std::move(layout)), hidden1_(hidden1), hidden2_(hidden2) {
  params.w1 = Eigen::MatrixXd::Zero(hidden1_, layout_.input_dim);
  params.b1 = Eigen::VectorXd::Zero(hidden1_);
  params.w2 = Eigen::MatrixXd::Zero(hidden2_, hidden1_);
  params.b2 = Eigen::VectorXd::Zero(hidden2_);
  params.w_time = Eigen::MatrixXd::Zero(layout_.time_steps, hidden2_);
  params.b_time = Eigen::VectorXd::Zero(layout_.time_steps);
  const int slots = static_cast<int>(layout_.actionable.size());
  params.w_feat = Eigen::MatrixXd::Zero(slots, hidden2_);
  params.b_feat = Eigen::VectorXd::Zero(slots);
  params.w_mean = Eigen::MatrixXd::Zero(layout_.continuous_count, hidden2_);
  params.b_mean = Eigen::VectorXd::Zero(layout_.continuous_count);
  params.w_std = Eigen::MatrixXd::Zero(layout_.continuous_count, hidden2_);
  params.b_std = Eigen::VectorXd::Zero(layout_.continuous_count);
  params.w_value = Eigen::MatrixXd::Zero(layout_.value_dim, hidden2_);
  params.b_value = Eigen::VectorXd::Zero(layout_.value_dim);
}

void PolicyNetwork::init_weights(Rng& rng) {
  for_each_tensor(params, [&](auto& t) {
    using Tensor = std::decay_t<decltype(t)>;
    if constexpr (Tensor::ColsAtCompileTime == 1) {
      t.setZero();  // biases
    } else {
      const double limit = std::sqrt(6.0 / static_cast<double>(t.cols()));
      for (Eigen::Index j = 0; j < t.cols(); ++j) {
        for (Eigen::Index i = 0; i < t.rows(); ++i) {
          t(i, j) = rng.uniform(-limit, limit);
        }
      }
    }
  });
}

DistributionParams PolicyNetwork::forward(const SeriesSample& state) const {
  const Eigen::VectorXd x = flatten_state(state);
  if (x.size() != layout_.input_dim) {
    throw DimensionError("policy input has size " + std::to_string(x.size()) +
                         ", expected " + std::to_string(layout_.input_dim));
  }
  const Eigen::VectorXd pre1 = params.w1 * x + params.b1;
  const Eigen::VectorXd h1 = pre1.cwiseMax(0.0);
  const Eigen::VectorXd pre2 = params.w2 * h1 + params.b2;
  const Eigen::VectorXd h2 = pre2.cwiseMax(0.0);

  DistributionParams dist;
  dist.time_probs = softmax(params.w_time * h2 + params.b_time);
  dist.feature_probs = softmax(params.w_feat * h2 + params.b_feat);
  dist.mean = params.w_mean * h2 + params.b_mean;
  const Eigen::VectorXd z_std = params.w_std * h2 + params.b_std;
  dist.stddev.resize(z_std.size());
  for (Eigen::Index i = 0; i < z_std.size(); ++i) {
    dist.stddev[i] = softplus(z_std[i]) + kStddevFloor;
  }
  dist.value_probs.resize(layout_.value_dim);
  const Eigen::VectorXd z_value = params.w_value * h2 + params.b_value;
  for (size_t slot = 0; slot < layout_.actionable.size(); ++slot) {
    const int offset = layout_.segment_offset[slot];
    if (offset < 0) continue;
    const int size = layout_.segment_size[slot];
    dist.value_probs.segment(offset, size) = softmax(z_value.segment(offset, size));
  }
  return dist;
}

ActionTriple PolicyNetwork::sample_action(const DistributionParams& dist, Rng& rng) const {
  ActionTriple action;
  action.time_step = rng.categorical(dist.time_probs);
  action.feature_slot = rng.categorical(dist.feature_probs);
  const int mu_index = layout_.continuous_slot[static_cast<size_t>(action.feature_slot)];
  if (mu_index >= 0) {
    action.value = rng.normal(dist.mean[mu_index], dist.stddev[mu_index]);
  } else {
    const int offset = layout_.segment_offset[static_cast<size_t>(action.feature_slot)];
    const int size = layout_.segment_size[static_cast<size_t>(action.feature_slot)];
    action.value = rng.categorical(dist.value_probs.segment(offset, size));
  }
  return action;
}

double PolicyNetwork::log_prob(const DistributionParams& dist,
                               const ActionTriple& action) const {
  double lp = safe_log(dist.time_probs[action.time_step]) +
              safe_log(dist.feature_probs[action.feature_slot]);
  const int mu_index = layout_.continuous_slot[static_cast<size_t>(action.feature_slot)];
  if (mu_index >= 0) {
    const double sigma = dist.stddev[mu_index];
    const double z = (action.value - dist.mean[mu_index]) / sigma;
    lp += -0.5 * kLogTwoPi - std::log(sigma) - 0.5 * z * z;
  } else {
    const int offset = layout_.segment_offset[static_cast<size_t>(action.feature_slot)];
    lp += safe_log(dist.value_probs[offset + static_cast<int>(action.value)]);
  }
  return lp;
}

PolicyParams PolicyNetwork::grad_log_prob(const SeriesSample& state,
                                          const ActionTriple& action) const {
  // Forward pass, keeping activations.
  const Eigen::VectorXd x = flatten_state(state);
  if (x.size() != layout_.input_dim) {
    throw DimensionError("policy input has size " + std::to_string(x.size()) +
                         ", expected " + std::to_string(layout_.input_dim));
  }
  const Eigen::VectorXd pre1 = params.w1 * x + params.b1;
  const Eigen::VectorXd h1 = pre1.cwiseMax(0.0);
  const Eigen::VectorXd pre2 = params.w2 * h1 + params.b2;
  const Eigen::VectorXd h2 = pre2.cwiseMax(0.0);

  const Eigen::VectorXd p_time = softmax(params.w_time * h2 + params.b_time);
  const Eigen::VectorXd p_feat = softmax(params.w_feat * h2 + params.b_feat);
  const Eigen::VectorXd mu = params.w_mean * h2 + params.b_mean;
  const Eigen::VectorXd z_std = params.w_std * h2 + params.b_std;
  const Eigen::VectorXd z_value = params.w_value * h2 + params.b_value;

  // Head-input gradients of ln pi.
  Eigen::VectorXd g_time = -p_time;
  g_time[action.time_step] += 1.0;
  Eigen::VectorXd g_feat = -p_feat;
  g_feat[action.feature_slot] += 1.0;

  Eigen::VectorXd g_mu = Eigen::VectorXd::Zero(layout_.continuous_count);
  Eigen::VectorXd g_zstd = Eigen::VectorXd::Zero(layout_.continuous_count);
  Eigen::VectorXd g_value = Eigen::VectorXd::Zero(layout_.value_dim);

  const int mu_index = layout_.continuous_slot[static_cast<size_t>(action.feature_slot)];
  if (mu_index >= 0) {
    const double sigma = softplus(z_std[mu_index]) + kStddevFloor;
    const double diff = action.value - mu[mu_index];
    g_mu[mu_index] = diff / (sigma * sigma);
    const double d_sigma = diff * diff / (sigma * sigma * sigma) - 1.0 / sigma;
    g_zstd[mu_index] = d_sigma * logistic(z_std[mu_index]);
  } else {
    const int offset = layout_.segment_offset[static_cast<size_t>(action.feature_slot)];
    const int size = layout_.segment_size[static_cast<size_t>(action.feature_slot)];
    const Eigen::VectorXd p_seg = softmax(z_value.segment(offset, size));
    g_value.segment(offset, size) = -p_seg;
    g_value[offset + static_cast<int>(action.value)] += 1.0;
  }

  PolicyParams grad = PolicyParams::zeros_like(params);
  grad.w_time = g_time * h2.transpose();
  grad.b_time = g_time;
  grad.w_feat = g_feat * h2.transpose();
  grad.b_feat = g_feat;
  grad.w_mean = g_mu * h2.transpose();
  grad.b_mean = g_mu;
  grad.w_std = g_zstd * h2.transpose();
  grad.b_std = g_zstd;
  grad.w_value = g_value * h2.transpose();
  grad.b_value = g_value;

  Eigen::VectorXd g_h2 = params.w_time.transpose() * g_time +
                         params.w_feat.transpose() * g_feat +
                         params.w_mean.transpose() * g_mu +
                         params.w_std.transpose() * g_zstd +
                         params.w_value.transpose() * g_value;
  Eigen::VectorXd g_pre2 =
      (g_h2.array() * (pre2.array() > 0.0).cast<double>()).matrix();
  grad.w2 = g_pre2 * h1.transpose();
  grad.b2 = g_pre2;

  Eigen::VectorXd g_h1 = params.w2.transpose() * g_pre2;
  Eigen::VectorXd g_pre1 =
      (g_h1.array() * (pre1.array() > 0.0).cast<double>()).matrix();
  grad.w1 = g_pre1 * x.transpose();
  grad.b1 = g_pre1;
  return grad;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double discount) {
  std::vector<double> returns(rewards.size(), 0.0);
  double tail = 0.0;
  for (int t = static_cast<int>(rewards.size()) - 1; t >= 0; --t) {
    tail = rewards[static_cast<size_t>(t)] + discount * tail;
    returns[static_cast<size_t>(t)] = tail;
  }
  return returns;
}

void reinforce_update(PolicyNetwork& policy, AdamOptimizer& optimizer,
                      std::span<const TimeStep> trajectory, double discount) {
  if (trajectory.empty()) return;

  std::vector<double> rewards;
  rewards.reserve(trajectory.size());
  for (const TimeStep& step : trajectory) rewards.push_back(step.reward);
  const std::vector<double> returns = discounted_returns(rewards, discount);

  const PolicyParams snapshot = policy.params;
  double discount_pow = 1.0;
  for (size_t t = 0; t < trajectory.size(); ++t, discount_pow *= discount) {
    const double coefficient = discount_pow * returns[t];
    if (coefficient == 0.0) continue;

    PolicyParams grad =
        policy.grad_log_prob(trajectory[t].state, trajectory[t].action);
    // Minimize -gamma^t * G_t * ln pi.
    for_each_tensor(grad, [&](auto& g) { g *= -coefficient; });
    optimizer.step(policy.params, grad);
    if (!policy.params.all_finite()) {
      policy.params = snapshot;
      throw NumericError("policy update produced non-finite parameters at step " +
                         std::to_string(t));
    }
  }
}

}  // namespace cfe
