#include "slr/training.hpp"

#include <cmath>
#include <numeric>

#include "slr/errors.hpp"
#include "slr/rng.hpp"

namespace slr {

namespace {

void check_same_shape(const ModelParams& a, const GradientSet& b) {
  bool ok = a.layers.size() == b.layers.size() && a.w_out.rows() == b.w_out.rows() &&
            a.w_out.cols() == b.w_out.cols() && a.b_out.size() == b.b_out.size();
  for (std::size_t l = 0; ok && l < a.layers.size(); ++l) {
    ok = a.layers[l].w_f.rows() == b.layers[l].w_f.rows() &&
         a.layers[l].w_f.cols() == b.layers[l].w_f.cols();
  }
  if (!ok) throw ShapeMismatch("gradient shapes do not match parameters");
}

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) best = k;
  }
  return best;
}

}  // namespace

AdamState init_adam(const ModelParams& model) {
  return {zero_like(model), zero_like(model), 0};
}

void adam_step(ModelParams& params, const GradientSet& grads, AdamState& state,
               const TrainConfig& config) {
  check_same_shape(params, grads);
  check_same_shape(params, state.m);

  state.t += 1;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.t));

  std::size_t idx = 0;
  std::vector<std::pair<const double*, Eigen::Index>> grad_views;
  for_each_tensor(grads, [&](const std::string&, const auto& tensor) {
    grad_views.emplace_back(tensor.data(), tensor.size());
  });
  std::vector<double*> m_views, v_views;
  for_each_tensor(state.m, [&](const std::string&, auto& tensor) { m_views.push_back(tensor.data()); });
  for_each_tensor(state.v, [&](const std::string&, auto& tensor) { v_views.push_back(tensor.data()); });

  for_each_tensor(params, [&](const std::string&, auto& tensor) {
    const auto [g, n] = grad_views[idx];
    double* m = m_views[idx];
    double* v = v_views[idx];
    double* p = tensor.data();
    for (Eigen::Index k = 0; k < n; ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      const double mhat = m[k] / corr1;
      const double vhat = v[k] / corr2;
      p[k] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_eps);
    }
    ++idx;
  });
}

double clip_global_norm(GradientSet& grads, double max_norm) {
  double sq = 0.0;
  for_each_tensor(grads, [&](const std::string&, const auto& tensor) {
    sq += tensor.squaredNorm();
  });
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for_each_tensor(grads, [&](const std::string&, auto& tensor) { tensor *= scale; });
  }
  return norm;
}

std::pair<ModelParams, TrainLog> train(const std::vector<Sample>& data,
                                       const TrainConfig& config, ModelParams init,
                                       const EpochCallback& on_epoch) {
  if (data.empty()) throw EmptyDataset("training set is empty");
  if (config.epochs < 1) throw InvalidConfig("epochs must be >= 1");
  const Eigen::Index num_classes = init.num_classes();
  for (const Sample& s : data) {
    if (s.label < 0 || s.label >= num_classes) {
      throw LabelOutOfRange("sample label " + std::to_string(s.label) +
                            " outside model class range");
    }
    if (s.features.cols() != init.input_size()) {
      throw DimensionMismatch("sample feature width does not match model");
    }
  }

  ModelParams model = std::move(init);
  AdamState adam = init_adam(model);
  Rng rng(mix64(config.seed, 0x74726e73u));

  TrainLog log;
  log.epochs.reserve(static_cast<std::size_t>(config.epochs));

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t idx : order) {
      const Sample& sample = data[idx];
      auto [logits, trace] = forward(model, sample.features);
      auto [loss, dlogits] = softmax_cross_entropy(logits, sample.label);
      loss_sum += loss;
      if (argmax_lowest(logits) == sample.label) ++correct;

      GradientSet grads = backward(model, trace, dlogits);
      clip_global_norm(grads, config.grad_clip);
      adam_step(model, grads, adam, config);
    }

    EpochStats stats;
    stats.mean_loss = loss_sum / static_cast<double>(data.size());
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    log.epochs.push_back(stats);
    if (on_epoch) on_epoch(epoch + 1, stats);
  }

  return {std::move(model), std::move(log)};
}

}  // namespace slr
