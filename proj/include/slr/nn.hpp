#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace slr {

/// Gate parameters of one LSTM layer. Every weight matrix has shape
/// hidden x (hidden + input) and acts on the concatenation [h_prev, x]
/// with the hidden part first.
struct LstmLayerParams {
  Eigen::MatrixXd w_f, w_i, w_c, w_o;
  Eigen::VectorXd b_f, b_i, b_c, b_o;

  Eigen::Index hidden_size() const { return w_f.rows(); }
  Eigen::Index input_size() const { return w_f.cols() - w_f.rows(); }
};

struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

LstmState zero_state(Eigen::Index hidden);

struct GateRecord {
  Eigen::VectorXd f, i, cbar, o;
};

/// Stacked LSTM plus affine softmax head. Layer k consumes layer k-1's
/// hidden state; layer 0 consumes the 60-dim feature rows.
struct ModelParams {
  std::vector<LstmLayerParams> layers;
  Eigen::MatrixXd w_out;  // num_classes x hidden of the top layer
  Eigen::VectorXd b_out;

  Eigen::Index num_layers() const { return static_cast<Eigen::Index>(layers.size()); }
  Eigen::Index input_size() const { return layers.front().input_size(); }
  Eigen::Index hidden_size() const { return layers.back().hidden_size(); }
  Eigen::Index num_classes() const { return w_out.rows(); }
};

/// Gradients (or Adam moments) share the parameter layout exactly.
using GradientSet = ModelParams;

/// Everything the backward pass needs from one cell evaluation.
struct LayerStep {
  Eigen::VectorXd x, h_prev, c_prev;
  GateRecord gates;
  Eigen::VectorXd c, h;
};

struct ForwardTrace {
  std::vector<std::vector<LayerStep>> steps;  // [layer][t]

  Eigen::Index seq_len() const {
    return steps.empty() ? 0 : static_cast<Eigen::Index>(steps.front().size());
  }
};

/// One cell evaluation:
///   f = sigmoid(w_f [h,x] + b_f)    i = sigmoid(w_i [h,x] + b_i)
///   cbar = tanh(w_c [h,x] + b_c)    c' = f*c + i*cbar
///   o = sigmoid(w_o [h,x] + b_o)    h' = o * tanh(c')
std::pair<LstmState, GateRecord> lstm_cell_step(const LstmLayerParams& params,
                                                const LstmState& state,
                                                const Eigen::VectorXd& x);

/// Unrolls the stack over the feature rows from zero states and applies the
/// head to the top layer's last hidden state.
std::pair<Eigen::VectorXd, ForwardTrace> forward(const ModelParams& model,
                                                 const Eigen::MatrixXd& features);

/// Same logits without recording a trace.
Eigen::VectorXd forward_logits(const ModelParams& model, const Eigen::MatrixXd& features);

/// Returns (loss, dlogits) with max-subtraction for stability.
std::pair<double, Eigen::VectorXd> softmax_cross_entropy(const Eigen::VectorXd& logits,
                                                         int label);

/// Exact reverse-mode gradients of the loss whose dlogits is given,
/// backpropagated through the recorded trace.
GradientSet backward(const ModelParams& model, const ForwardTrace& trace,
                     const Eigen::VectorXd& dlogits);

GradientSet zero_like(const ModelParams& model);

/// Uniform(-s, s) weights with s = 1/sqrt(fan_in); biases zero except the
/// forget-gate bias, which starts at 1.
ModelParams init_params(int num_classes, int input_size, int hidden_size,
                        int num_layers, std::uint64_t seed);

/// Visits every tensor with its serialized name (W_f.0, b_f.0, ..., W_out,
/// b_out); the order here defines the model file layout.
template <typename Model, typename Fn>
void for_each_tensor(Model& model, Fn&& fn) {
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& lp = model.layers[l];
    const std::string suffix = "." + std::to_string(l);
    fn("W_f" + suffix, lp.w_f);
    fn("b_f" + suffix, lp.b_f);
    fn("W_i" + suffix, lp.w_i);
    fn("b_i" + suffix, lp.b_i);
    fn("W_C" + suffix, lp.w_c);
    fn("b_C" + suffix, lp.b_c);
    fn("W_o" + suffix, lp.w_o);
    fn("b_o" + suffix, lp.b_o);
  }
  fn("W_out", model.w_out);
  fn("b_out", model.b_out);
}

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
};

/// Central finite differences (step h) of the cross-entropy loss against the
/// analytic BPTT gradients, over every parameter of `model`. `analytic`
/// overrides the internally computed gradients; tests use it to prove the
/// check catches corrupted backward passes.
GradCheckResult finite_difference_check(const ModelParams& model,
                                        const Eigen::MatrixXd& features, int label,
                                        double step = 1e-5,
                                        const GradientSet* analytic = nullptr);

/// Convenience harness used by the gradcheck command: random small model
/// (input 3, hidden 4, 2 layers, T=5, 3 classes) derived from `seed`.
GradCheckResult gradcheck_small_model(std::uint64_t seed, double step = 1e-5);

}  // namespace slr
