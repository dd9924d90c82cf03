#pragma once

#include <cmath>
#include <vector>

#include "slr/nn.hpp"

namespace slr::test {

/// Straight-line re-evaluation of the cell equations on plain arrays; kept
/// free of Eigen and of the library forward path on purpose.
inline std::vector<double> oracle_forward(const ModelParams& model,
                                          const Eigen::MatrixXd& features) {
  const std::size_t num_layers = model.layers.size();
  std::vector<std::vector<double>> h(num_layers), c(num_layers);
  for (std::size_t l = 0; l < num_layers; ++l) {
    h[l].assign(static_cast<std::size_t>(model.layers[l].hidden_size()), 0.0);
    c[l].assign(static_cast<std::size_t>(model.layers[l].hidden_size()), 0.0);
  }

  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    std::vector<double> x(static_cast<std::size_t>(features.cols()));
    for (Eigen::Index k = 0; k < features.cols(); ++k) {
      x[static_cast<std::size_t>(k)] = features(t, k);
    }

    for (std::size_t l = 0; l < num_layers; ++l) {
      const LstmLayerParams& p = model.layers[l];
      const std::size_t hidden = h[l].size();
      std::vector<double> z(hidden + x.size());
      for (std::size_t k = 0; k < hidden; ++k) z[k] = h[l][k];
      for (std::size_t k = 0; k < x.size(); ++k) z[hidden + k] = x[k];

      std::vector<double> hn(hidden), cn(hidden);
      for (std::size_t r = 0; r < hidden; ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        double af = p.b_f[row];
        double ai = p.b_i[row];
        double ac = p.b_c[row];
        double ao = p.b_o[row];
        for (std::size_t k = 0; k < z.size(); ++k) {
          const auto col = static_cast<Eigen::Index>(k);
          af += p.w_f(row, col) * z[k];
          ai += p.w_i(row, col) * z[k];
          ac += p.w_c(row, col) * z[k];
          ao += p.w_o(row, col) * z[k];
        }
        const double f = 1.0 / (1.0 + std::exp(-af));
        const double i = 1.0 / (1.0 + std::exp(-ai));
        const double cbar = std::tanh(ac);
        const double o = 1.0 / (1.0 + std::exp(-ao));
        cn[r] = f * c[l][r] + i * cbar;
        hn[r] = o * std::tanh(cn[r]);
      }
      h[l] = hn;
      c[l] = cn;
      x = h[l];
    }
  }

  const std::size_t classes = static_cast<std::size_t>(model.w_out.rows());
  std::vector<double> logits(classes);
  for (std::size_t r = 0; r < classes; ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    double acc = model.b_out[row];
    for (std::size_t k = 0; k < h.back().size(); ++k) {
      acc += model.w_out(row, static_cast<Eigen::Index>(k)) * h.back()[k];
    }
    logits[r] = acc;
  }
  return logits;
}

}  // namespace slr::test
