#include "slr/nn.hpp"

#include <cmath>

#include "slr/errors.hpp"
#include "slr/rng.hpp"

namespace slr {

namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& a) { return 1.0 / (1.0 + (-a).exp()); }

void check_layer_dims(const LstmLayerParams& p) {
  const Eigen::Index h = p.w_f.rows();
  const Eigen::Index cols = p.w_f.cols();
  const bool ok = p.w_i.rows() == h && p.w_c.rows() == h && p.w_o.rows() == h &&
                  p.w_i.cols() == cols && p.w_c.cols() == cols && p.w_o.cols() == cols &&
                  p.b_f.size() == h && p.b_i.size() == h && p.b_c.size() == h &&
                  p.b_o.size() == h && cols > h;
  if (!ok) throw DimensionMismatch("inconsistent LSTM layer parameter shapes");
}

}  // namespace

LstmState zero_state(Eigen::Index hidden) {
  return {Eigen::VectorXd::Zero(hidden), Eigen::VectorXd::Zero(hidden)};
}

std::pair<LstmState, GateRecord> lstm_cell_step(const LstmLayerParams& params,
                                                const LstmState& state,
                                                const Eigen::VectorXd& x) {
  check_layer_dims(params);
  const Eigen::Index h = params.hidden_size();
  const Eigen::Index in = params.input_size();
  if (state.h.size() != h || state.c.size() != h) {
    throw DimensionMismatch("LSTM state size does not match layer hidden size");
  }
  if (x.size() != in) {
    throw DimensionMismatch("LSTM input size does not match layer weights");
  }

  Eigen::VectorXd z(h + in);
  z.head(h) = state.h;
  z.tail(in) = x;

  GateRecord g;
  g.f = sigmoid((params.w_f * z + params.b_f).array());
  g.i = sigmoid((params.w_i * z + params.b_i).array());
  g.cbar = (params.w_c * z + params.b_c).array().tanh();
  g.o = sigmoid((params.w_o * z + params.b_o).array());

  LstmState next;
  next.c = g.f.array() * state.c.array() + g.i.array() * g.cbar.array();
  next.h = g.o.array() * next.c.array().tanh();
  return {std::move(next), std::move(g)};
}

std::pair<Eigen::VectorXd, ForwardTrace> forward(const ModelParams& model,
                                                 const Eigen::MatrixXd& features) {
  if (model.layers.empty()) throw DimensionMismatch("model has no layers");
  if (features.rows() < 1) throw DimensionMismatch("feature matrix has no rows");
  if (features.cols() != model.input_size()) {
    throw DimensionMismatch("feature width does not match model input size");
  }

  const Eigen::Index num_layers = model.num_layers();
  const Eigen::Index steps = features.rows();

  ForwardTrace trace;
  trace.steps.resize(static_cast<std::size_t>(num_layers));
  for (auto& v : trace.steps) v.reserve(static_cast<std::size_t>(steps));

  std::vector<LstmState> states;
  states.reserve(static_cast<std::size_t>(num_layers));
  for (const auto& lp : model.layers) states.push_back(zero_state(lp.hidden_size()));

  for (Eigen::Index t = 0; t < steps; ++t) {
    Eigen::VectorXd x = features.row(t);
    for (Eigen::Index l = 0; l < num_layers; ++l) {
      const auto& lp = model.layers[static_cast<std::size_t>(l)];
      LayerStep step;
      step.x = x;
      step.h_prev = states[static_cast<std::size_t>(l)].h;
      step.c_prev = states[static_cast<std::size_t>(l)].c;
      auto [next, gates] = lstm_cell_step(lp, states[static_cast<std::size_t>(l)], x);
      step.gates = std::move(gates);
      step.c = next.c;
      step.h = next.h;
      x = next.h;
      states[static_cast<std::size_t>(l)] = std::move(next);
      trace.steps[static_cast<std::size_t>(l)].push_back(std::move(step));
    }
  }

  Eigen::VectorXd logits = model.w_out * states.back().h + model.b_out;
  return {std::move(logits), std::move(trace)};
}

Eigen::VectorXd forward_logits(const ModelParams& model, const Eigen::MatrixXd& features) {
  if (model.layers.empty()) throw DimensionMismatch("model has no layers");
  if (features.rows() < 1) throw DimensionMismatch("feature matrix has no rows");
  if (features.cols() != model.input_size()) {
    throw DimensionMismatch("feature width does not match model input size");
  }

  std::vector<LstmState> states;
  states.reserve(model.layers.size());
  for (const auto& lp : model.layers) states.push_back(zero_state(lp.hidden_size()));

  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    Eigen::VectorXd x = features.row(t);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      auto [next, gates] = lstm_cell_step(model.layers[l], states[l], x);
      x = next.h;
      states[l] = std::move(next);
    }
  }
  return model.w_out * states.back().h + model.b_out;
}

std::pair<double, Eigen::VectorXd> softmax_cross_entropy(const Eigen::VectorXd& logits,
                                                         int label) {
  if (label < 0 || label >= logits.size()) {
    throw LabelOutOfRange("label " + std::to_string(label) + " outside [0, " +
                          std::to_string(logits.size()) + ")");
  }
  const double max = logits.maxCoeff();
  const Eigen::ArrayXd shifted = logits.array() - max;
  const Eigen::ArrayXd exps = shifted.exp();
  const double sum = exps.sum();
  const double loss = std::log(sum) - shifted[label];

  Eigen::VectorXd dlogits = (exps / sum).matrix();
  dlogits[label] -= 1.0;
  return {loss, std::move(dlogits)};
}

GradientSet zero_like(const ModelParams& model) {
  GradientSet g;
  g.layers.reserve(model.layers.size());
  for (const auto& lp : model.layers) {
    LstmLayerParams zl;
    zl.w_f = Eigen::MatrixXd::Zero(lp.w_f.rows(), lp.w_f.cols());
    zl.w_i = zl.w_f;
    zl.w_c = zl.w_f;
    zl.w_o = zl.w_f;
    zl.b_f = Eigen::VectorXd::Zero(lp.b_f.size());
    zl.b_i = zl.b_f;
    zl.b_c = zl.b_f;
    zl.b_o = zl.b_f;
    g.layers.push_back(std::move(zl));
  }
  g.w_out = Eigen::MatrixXd::Zero(model.w_out.rows(), model.w_out.cols());
  g.b_out = Eigen::VectorXd::Zero(model.b_out.size());
  return g;
}

GradientSet backward(const ModelParams& model, const ForwardTrace& trace,
                     const Eigen::VectorXd& dlogits) {
  const Eigen::Index num_layers = model.num_layers();
  if (static_cast<Eigen::Index>(trace.steps.size()) != num_layers) {
    throw TraceMismatch("trace layer count does not match model");
  }
  const Eigen::Index steps = trace.seq_len();
  if (steps < 1) throw TraceMismatch("trace is empty");
  for (Eigen::Index l = 0; l < num_layers; ++l) {
    const auto& layer_steps = trace.steps[static_cast<std::size_t>(l)];
    if (static_cast<Eigen::Index>(layer_steps.size()) != steps ||
        layer_steps.front().h_prev.size() !=
            model.layers[static_cast<std::size_t>(l)].hidden_size()) {
      throw TraceMismatch("trace shapes do not match model");
    }
  }
  if (dlogits.size() != model.num_classes()) {
    throw TraceMismatch("dlogits size does not match class count");
  }

  GradientSet grads = zero_like(model);

  const auto& top_last = trace.steps[static_cast<std::size_t>(num_layers - 1)].back();
  grads.w_out.noalias() = dlogits * top_last.h.transpose();
  grads.b_out = dlogits;

  // dh carried to the previous timestep of the same layer, dc likewise.
  std::vector<Eigen::VectorXd> dh_next(static_cast<std::size_t>(num_layers));
  std::vector<Eigen::VectorXd> dc_next(static_cast<std::size_t>(num_layers));
  for (Eigen::Index l = 0; l < num_layers; ++l) {
    const Eigen::Index h = model.layers[static_cast<std::size_t>(l)].hidden_size();
    dh_next[static_cast<std::size_t>(l)] = Eigen::VectorXd::Zero(h);
    dc_next[static_cast<std::size_t>(l)] = Eigen::VectorXd::Zero(h);
  }

  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    Eigen::VectorXd dx_above;  // gradient wrt the layer-below hidden state at time t
    for (Eigen::Index l = num_layers - 1; l >= 0; --l) {
      const auto& lp = model.layers[static_cast<std::size_t>(l)];
      auto& lg = grads.layers[static_cast<std::size_t>(l)];
      const LayerStep& s = trace.steps[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)];
      const Eigen::Index h = lp.hidden_size();
      const Eigen::Index in = lp.input_size();

      Eigen::VectorXd dh = dh_next[static_cast<std::size_t>(l)];
      if (l == num_layers - 1) {
        if (t == steps - 1) dh.noalias() += model.w_out.transpose() * dlogits;
      } else {
        dh += dx_above;
      }

      const Eigen::ArrayXd tanh_c = s.c.array().tanh();
      const Eigen::ArrayXd do_ = dh.array() * tanh_c;
      const Eigen::ArrayXd dc = dh.array() * s.gates.o.array() * (1.0 - tanh_c.square()) +
                                dc_next[static_cast<std::size_t>(l)].array();

      const Eigen::ArrayXd da_f =
          dc * s.c_prev.array() * s.gates.f.array() * (1.0 - s.gates.f.array());
      const Eigen::ArrayXd da_i =
          dc * s.gates.cbar.array() * s.gates.i.array() * (1.0 - s.gates.i.array());
      const Eigen::ArrayXd da_c =
          dc * s.gates.i.array() * (1.0 - s.gates.cbar.array().square());
      const Eigen::ArrayXd da_o = do_ * s.gates.o.array() * (1.0 - s.gates.o.array());

      Eigen::VectorXd z(h + in);
      z.head(h) = s.h_prev;
      z.tail(in) = s.x;

      lg.w_f.noalias() += da_f.matrix() * z.transpose();
      lg.w_i.noalias() += da_i.matrix() * z.transpose();
      lg.w_c.noalias() += da_c.matrix() * z.transpose();
      lg.w_o.noalias() += da_o.matrix() * z.transpose();
      lg.b_f += da_f.matrix();
      lg.b_i += da_i.matrix();
      lg.b_c += da_c.matrix();
      lg.b_o += da_o.matrix();

      Eigen::VectorXd dz = lp.w_f.transpose() * da_f.matrix();
      dz.noalias() += lp.w_i.transpose() * da_i.matrix();
      dz.noalias() += lp.w_c.transpose() * da_c.matrix();
      dz.noalias() += lp.w_o.transpose() * da_o.matrix();

      dh_next[static_cast<std::size_t>(l)] = dz.head(h);
      dc_next[static_cast<std::size_t>(l)] = (dc * s.gates.f.array()).matrix();
      if (l > 0) dx_above = dz.tail(in);
    }
  }

  return grads;
}

ModelParams init_params(int num_classes, int input_size, int hidden_size,
                        int num_layers, std::uint64_t seed) {
  if (num_classes < 2) throw InvalidDimension("num_classes must be >= 2");
  if (input_size < 1 || hidden_size < 1 || num_layers < 1) {
    throw InvalidDimension("input, hidden and layer counts must be >= 1");
  }

  Rng rng(mix64(seed, 0x6c73746du));  // dedicated stream for weight draws

  auto uniform_matrix = [&rng](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    const double s = 1.0 / std::sqrt(static_cast<double>(cols));
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        m(r, c) = rng.uniform(-s, s);
      }
    }
    return m;
  };

  ModelParams model;
  model.layers.reserve(static_cast<std::size_t>(num_layers));
  int in = input_size;
  for (int l = 0; l < num_layers; ++l) {
    LstmLayerParams lp;
    lp.w_f = uniform_matrix(hidden_size, hidden_size + in);
    lp.w_i = uniform_matrix(hidden_size, hidden_size + in);
    lp.w_c = uniform_matrix(hidden_size, hidden_size + in);
    lp.w_o = uniform_matrix(hidden_size, hidden_size + in);
    lp.b_f = Eigen::VectorXd::Ones(hidden_size);  // keeps the cell state alive early
    lp.b_i = Eigen::VectorXd::Zero(hidden_size);
    lp.b_c = Eigen::VectorXd::Zero(hidden_size);
    lp.b_o = Eigen::VectorXd::Zero(hidden_size);
    model.layers.push_back(std::move(lp));
    in = hidden_size;
  }
  model.w_out = uniform_matrix(num_classes, hidden_size);
  model.b_out = Eigen::VectorXd::Zero(num_classes);
  return model;
}

GradCheckResult finite_difference_check(const ModelParams& model,
                                        const Eigen::MatrixXd& features, int label,
                                        double step, const GradientSet* analytic_in) {
  GradientSet computed;
  if (!analytic_in) {
    auto [logits, trace] = forward(model, features);
    auto [loss, dlogits] = softmax_cross_entropy(logits, label);
    (void)loss;
    computed = backward(model, trace, dlogits);
  }
  const GradientSet& analytic = analytic_in ? *analytic_in : computed;

  ModelParams probe = model;

  auto loss_at = [&](const ModelParams& m) {
    return softmax_cross_entropy(forward_logits(m, features), label).first;
  };

  GradCheckResult result;

  // Walk parameters and gradients in lockstep; for_each_tensor fixes the order.
  std::vector<std::pair<std::string, Eigen::Map<Eigen::VectorXd>>> probe_views;
  std::vector<Eigen::Map<const Eigen::VectorXd>> grad_views;
  for_each_tensor(probe, [&](const std::string& name, auto& tensor) {
    probe_views.emplace_back(name, Eigen::Map<Eigen::VectorXd>(tensor.data(), tensor.size()));
  });
  for_each_tensor(analytic, [&](const std::string&, const auto& tensor) {
    grad_views.emplace_back(tensor.data(), tensor.size());
  });

  for (std::size_t v = 0; v < probe_views.size(); ++v) {
    auto& [name, values] = probe_views[v];
    for (Eigen::Index k = 0; k < values.size(); ++k) {
      const double saved = values[k];
      values[k] = saved + step;
      const double plus = loss_at(probe);
      values[k] = saved - step;
      const double minus = loss_at(probe);
      values[k] = saved;

      const double numeric = (plus - minus) / (2.0 * step);
      const double a = grad_views[v][k];
      // 1e-3 floor: central differences of a ~O(1) loss carry an absolute
      // noise of ~1e-11, so near-zero gradients need an absolute scale.
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-3});
      if (rel > result.max_rel_err) {
        result.max_rel_err = rel;
        result.worst_param = name + "[" + std::to_string(k) + "]";
      }
    }
  }
  return result;
}

GradCheckResult gradcheck_small_model(std::uint64_t seed, double step) {
  constexpr int kInput = 3, kHidden = 4, kLayers = 2, kSteps = 5, kClasses = 3;
  ModelParams model = init_params(kClasses, kInput, kHidden, kLayers, seed);

  Rng rng(mix64(seed, 0x67636b64u));
  Eigen::MatrixXd features(kSteps, kInput);
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
      features(r, c) = rng.uniform(-1.0, 1.0);
    }
  }
  const int label = static_cast<int>(rng.below(kClasses));
  return finite_difference_check(model, features, label, step);
}

}  // namespace slr
