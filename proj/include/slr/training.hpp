#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "slr/nn.hpp"

namespace slr {

struct TrainConfig {
  int epochs = 1;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip = 5.0;  // global L2 norm
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct EpochStats {
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
};

struct Sample {
  Eigen::MatrixXd features;  // T x input_size
  int label = 0;
};

struct AdamState {
  GradientSet m;
  GradientSet v;
  std::int64_t t = 0;
};

AdamState init_adam(const ModelParams& model);

/// Standard Adam with bias correction, applied elementwise.
void adam_step(ModelParams& params, const GradientSet& grads, AdamState& state,
               const TrainConfig& config);

/// Scales the whole gradient set so its global L2 norm is at most max_norm.
/// Returns the pre-clip norm.
double clip_global_norm(GradientSet& grads, double max_norm);

using EpochCallback = std::function<void(int epoch, const EpochStats&)>;

/// Single-sample SGD loop: forward -> loss -> backward -> clip -> Adam,
/// with a seeded per-epoch shuffle. Deterministic given (data, config, init).
std::pair<ModelParams, TrainLog> train(const std::vector<Sample>& data,
                                       const TrainConfig& config, ModelParams init,
                                       const EpochCallback& on_epoch = {});

}  // namespace slr
