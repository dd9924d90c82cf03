#include <doctest.h>

#include <cmath>
#include <vector>

#include "slr/errors.hpp"
#include "slr/nn.hpp"
#include "slr/rng.hpp"
#include "oracle_lstm.hpp"
#include "test_support.hpp"

using namespace slr;
using slr::test::oracle_forward;

namespace {

LstmLayerParams scalar_layer(double w, double bf, double bi, double bc, double bo) {
  LstmLayerParams p;
  p.w_f = Eigen::MatrixXd::Constant(1, 2, w);
  p.w_i = p.w_f;
  p.w_c = p.w_f;
  p.w_o = p.w_f;
  p.b_f = Eigen::VectorXd::Constant(1, bf);
  p.b_i = Eigen::VectorXd::Constant(1, bi);
  p.b_c = Eigen::VectorXd::Constant(1, bc);
  p.b_o = Eigen::VectorXd::Constant(1, bo);
  return p;
}

Eigen::MatrixXd random_features(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("cell step: zero weights give the sigmoid/tanh fixed values") {
  LstmLayerParams p = scalar_layer(0.0, 0.0, 0.0, 0.0, 0.0);
  auto [state, gates] = lstm_cell_step(p, zero_state(1), Eigen::VectorXd::Constant(1, 3.7));
  CHECK(gates.f[0] == 0.5);
  CHECK(gates.i[0] == 0.5);
  CHECK(gates.o[0] == 0.5);
  CHECK(gates.cbar[0] == 0.0);
  CHECK(state.c[0] == 0.0);
  CHECK(state.h[0] == 0.0);
}

TEST_CASE("cell step: scalar hand-derived example") {
  // hidden=1, input=1, all weights 0.5, zero bias/state, x=1:
  // every gate preactivation is 0.5.
  LstmLayerParams p = scalar_layer(0.5, 0.0, 0.0, 0.0, 0.0);
  auto [state, gates] = lstm_cell_step(p, zero_state(1), Eigen::VectorXd::Ones(1));
  CHECK(gates.f[0] == doctest::Approx(0.6224593312018546).epsilon(1e-12));
  CHECK(gates.i[0] == doctest::Approx(0.6224593312018546).epsilon(1e-12));
  CHECK(gates.o[0] == doctest::Approx(0.6224593312018546).epsilon(1e-12));
  CHECK(gates.cbar[0] == doctest::Approx(0.46211715726000974).epsilon(1e-12));
  CHECK(state.c[0] == doctest::Approx(0.28764913664496794).epsilon(1e-12));
  CHECK(state.h[0] == doctest::Approx(0.17426971865610508).epsilon(1e-12));
}

TEST_CASE("cell step: saturated gates carry the cell state unchanged") {
  const Eigen::Index hidden = 3;
  LstmLayerParams p;
  p.w_f = Eigen::MatrixXd::Zero(hidden, hidden + 2);
  p.w_i = p.w_f;
  p.w_c = p.w_f;
  p.w_o = p.w_f;
  p.b_f = Eigen::VectorXd::Constant(hidden, 50.0);   // f -> 1
  p.b_i = Eigen::VectorXd::Constant(hidden, -50.0);  // i -> 0
  p.b_c = Eigen::VectorXd::Zero(hidden);
  p.b_o = Eigen::VectorXd::Zero(hidden);

  LstmState state;
  state.h = Eigen::VectorXd::Zero(hidden);
  state.c = Eigen::VectorXd::LinSpaced(hidden, -0.4, 0.8);
  const Eigen::VectorXd c0 = state.c;

  Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    auto [next, gates] = lstm_cell_step(p, state, random_features(rng, 1, 2).row(0));
    state = next;
  }
  CHECK((state.c - c0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cell step rejects mismatched shapes") {
  LstmLayerParams p = scalar_layer(0.5, 0.0, 0.0, 0.0, 0.0);
  CHECK_THROWS_AS(lstm_cell_step(p, zero_state(2), Eigen::VectorXd::Ones(1)),
                  DimensionMismatch);
  CHECK_THROWS_AS(lstm_cell_step(p, zero_state(1), Eigen::VectorXd::Ones(3)),
                  DimensionMismatch);
}

TEST_CASE("forward: zero model propagates zeros into b_out") {
  ModelParams model;
  model.layers.push_back(scalar_layer(0.0, 0.0, 0.0, 0.0, 0.0));
  model.w_out = Eigen::MatrixXd::Zero(3, 1);
  model.b_out = Eigen::VectorXd::Zero(3);

  Rng rng(11);
  auto [logits, trace] = forward(model, random_features(rng, 7, 1));
  CHECK(logits.isZero(0.0));
  CHECK(trace.seq_len() == 7);
}

TEST_CASE("forward: T=1 single layer reduces to one cell step plus head") {
  ModelParams model = init_params(3, 2, 4, 1, 99);
  Rng rng(12);
  const Eigen::MatrixXd features = random_features(rng, 1, 2);

  auto [logits, trace] = forward(model, features);
  auto [state, gates] = lstm_cell_step(model.layers[0], zero_state(4), features.row(0));
  const Eigen::VectorXd expected = model.w_out * state.h + model.b_out;
  CHECK((logits - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward equals iterated lstm_cell_step") {
  ModelParams model = init_params(4, 3, 5, 2, 123);
  Rng rng(17);
  const Eigen::MatrixXd features = random_features(rng, 9, 3);

  auto [logits, trace] = forward(model, features);

  std::vector<LstmState> states{zero_state(5), zero_state(5)};
  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    Eigen::VectorXd x = features.row(t);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      auto [next, gates] = lstm_cell_step(model.layers[l], states[l], x);
      x = next.h;
      states[l] = next;
    }
  }
  const Eigen::VectorXd manual = model.w_out * states.back().h + model.b_out;
  CHECK((logits - manual).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("forward matches an independent straight-line oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ModelParams model = init_params(3, 3, 4, 2, seed);
    Rng rng(mix64(seed, 777));
    const Eigen::MatrixXd features = random_features(rng, 5, 3);

    const Eigen::VectorXd logits = forward_logits(model, features);
    const std::vector<double> expected = oracle_forward(model, features);
    REQUIRE(logits.size() == static_cast<Eigen::Index>(expected.size()));
    for (Eigen::Index k = 0; k < logits.size(); ++k) {
      CHECK(std::abs(logits[k] - expected[static_cast<std::size_t>(k)]) < 1e-12);
    }
  }
}

TEST_CASE("forward is deterministic bit-for-bit") {
  ModelParams model = init_params(5, 4, 6, 2, 321);
  Rng rng(23);
  const Eigen::MatrixXd features = random_features(rng, 11, 4);
  const Eigen::VectorXd a = forward_logits(model, features);
  const Eigen::VectorXd b = forward_logits(model, features);
  for (Eigen::Index k = 0; k < a.size(); ++k) CHECK(test::bits_equal(a[k], b[k]));
}

TEST_CASE("gate ranges stay open for bounded inputs") {
  Rng rng(29);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ModelParams model = init_params(3, 3, 4, 2, seed);
    auto [logits, trace] = forward(model, random_features(rng, 6, 3));
    for (const auto& layer_steps : trace.steps) {
      for (const LayerStep& s : layer_steps) {
        for (const auto* gate : {&s.gates.f, &s.gates.i, &s.gates.o}) {
          CHECK(gate->minCoeff() > 0.0);
          CHECK(gate->maxCoeff() < 1.0);
        }
        CHECK(s.gates.cbar.minCoeff() > -1.0);
        CHECK(s.gates.cbar.maxCoeff() < 1.0);
      }
    }
  }
}

TEST_CASE("softmax_cross_entropy: uniform, stability, zero-sum gradient") {
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 2.5);
  auto [loss, dlogits] = softmax_cross_entropy(uniform, 3);
  CHECK(loss == doctest::Approx(std::log(5.0)).epsilon(1e-15));
  for (int k = 0; k < 5; ++k) {
    const double expected = 0.2 - (k == 3 ? 1.0 : 0.0);
    CHECK(dlogits[k] == doctest::Approx(expected).epsilon(1e-14));
  }

  Eigen::VectorXd extreme(2);
  extreme << 1000.0, 0.0;
  auto [stable_loss, stable_d] = softmax_cross_entropy(extreme, 0);
  CHECK(std::isfinite(stable_loss));
  CHECK(stable_loss < 1e-12);

  Rng rng(31);
  for (int n = 0; n < 50; ++n) {
    Eigen::VectorXd logits(6);
    for (int k = 0; k < 6; ++k) logits[k] = rng.uniform(-30, 30);
    auto [l, d] = softmax_cross_entropy(logits, n % 6);
    CHECK(std::abs(d.sum()) < 1e-14);
  }

  CHECK_THROWS_AS(softmax_cross_entropy(uniform, 5), LabelOutOfRange);
  CHECK_THROWS_AS(softmax_cross_entropy(uniform, -1), LabelOutOfRange);
}

TEST_CASE("backward: zero dlogits gives zero gradients, runs are bit-identical") {
  ModelParams model = init_params(3, 3, 4, 2, 55);
  Rng rng(37);
  const Eigen::MatrixXd features = random_features(rng, 5, 3);
  auto [logits, trace] = forward(model, features);

  const GradientSet zeros = backward(model, trace, Eigen::VectorXd::Zero(3));
  for_each_tensor(zeros, [](const std::string&, const auto& tensor) {
    CHECK(tensor.cwiseAbs().maxCoeff() == 0.0);
  });

  auto [loss, dlogits] = softmax_cross_entropy(logits, 1);
  const GradientSet g1 = backward(model, trace, dlogits);
  const GradientSet g2 = backward(model, trace, dlogits);
  std::vector<const double*> flat;
  std::vector<Eigen::Index> sizes;
  for_each_tensor(g1, [&](const std::string&, const auto& t) {
    flat.push_back(t.data());
    sizes.push_back(t.size());
  });
  std::size_t idx = 0;
  for_each_tensor(g2, [&](const std::string&, const auto& t) {
    for (Eigen::Index k = 0; k < t.size(); ++k) CHECK(test::bits_equal(t.data()[k], flat[idx][k]));
    ++idx;
  });
}

TEST_CASE("backward matches central finite differences") {
  for (std::uint64_t seed : {0ull, 1ull}) {
    const GradCheckResult result = gradcheck_small_model(seed);
    CAPTURE(result.worst_param);
    CHECK(result.max_rel_err < 1e-6);
  }
}

TEST_CASE("finite_difference_check flags a corrupted gradient") {
  ModelParams model = init_params(3, 3, 4, 2, 77);
  Rng rng(41);
  const Eigen::MatrixXd features = random_features(rng, 5, 3);

  auto [logits, trace] = forward(model, features);
  auto [loss, dlogits] = softmax_cross_entropy(logits, 2);
  GradientSet corrupted = backward(model, trace, dlogits);
  corrupted.layers[1].w_c(2, 3) += 0.25;

  const GradCheckResult result = finite_difference_check(model, features, 2, 1e-5, &corrupted);
  CHECK(result.max_rel_err > 1e-6);
  CHECK(result.worst_param.find("W_C.1") != std::string::npos);
}

TEST_CASE("backward validates the trace") {
  ModelParams model = init_params(3, 3, 4, 2, 60);
  ModelParams other = init_params(3, 3, 5, 2, 61);
  Rng rng(43);
  auto [logits, trace] = forward(model, random_features(rng, 4, 3));
  CHECK_THROWS_AS(backward(other, trace, Eigen::VectorXd::Zero(3)), TraceMismatch);
  CHECK_THROWS_AS(backward(model, trace, Eigen::VectorXd::Zero(4)), TraceMismatch);
  CHECK_THROWS_AS(backward(model, ForwardTrace{}, Eigen::VectorXd::Zero(3)), TraceMismatch);
}

TEST_CASE("init_params: deterministic, seed-sensitive, forget bias of one") {
  const ModelParams a = init_params(4, 60, 8, 2, 2024);
  const ModelParams b = init_params(4, 60, 8, 2, 2024);
  const ModelParams c = init_params(4, 60, 8, 2, 2025);

  CHECK(a.layers[0].w_f == b.layers[0].w_f);
  CHECK(a.layers[1].w_o == b.layers[1].w_o);
  CHECK(a.w_out == b.w_out);
  CHECK(a.layers[0].w_f != c.layers[0].w_f);

  for (const auto& lp : a.layers) {
    CHECK((lp.b_f.array() == 1.0).all());
    CHECK(lp.b_i.isZero(0.0));
    CHECK(lp.b_c.isZero(0.0));
    CHECK(lp.b_o.isZero(0.0));
    const double bound = 1.0 / std::sqrt(static_cast<double>(lp.w_f.cols()));
    CHECK(lp.w_f.cwiseAbs().maxCoeff() <= bound);
  }
  CHECK(a.b_out.isZero(0.0));

  CHECK_THROWS_AS(init_params(1, 60, 8, 2, 0), InvalidDimension);
  CHECK_THROWS_AS(init_params(4, 0, 8, 2, 0), InvalidDimension);
  CHECK_THROWS_AS(init_params(4, 60, 8, 0, 0), InvalidDimension);
}

}  // TEST_SUITE
