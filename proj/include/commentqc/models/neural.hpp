#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "commentqc/error.hpp"
#include "commentqc/models/linear.hpp"
#include "commentqc/rng.hpp"
#include "commentqc/vectorize.hpp"

namespace commentqc::models {

/// One hidden ReLU layer, sigmoid output. w1 is row-major hidden × input.
struct NeuralParams {
  std::uint32_t hidden = 0;
  std::uint32_t input_dim = 0;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
};

/// Weights uniform(−1/√fan_in, +1/√fan_in) drawn in a fixed order from the
/// given stream, biases zero.
inline NeuralParams init_neural(std::uint32_t hidden, std::uint32_t input_dim, Rng& rng) {
  NeuralParams p;
  p.hidden = hidden;
  p.input_dim = input_dim;
  double bound1 = 1.0 / std::sqrt(static_cast<double>(std::max<std::uint32_t>(input_dim, 1)));
  double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  p.w1.resize(static_cast<std::size_t>(hidden) * input_dim);
  p.b1.assign(hidden, 0.0);
  p.w2.resize(hidden);
  for (auto& w : p.w1) w = uniform_real(rng, -bound1, bound1);
  for (auto& w : p.w2) w = uniform_real(rng, -bound2, bound2);
  p.b2 = 0.0;
  return p;
}

inline double neural_logit(const NeuralParams& p, const SparseVector& x,
                           std::vector<double>* hidden_out = nullptr) {
  std::vector<double> h(p.b1);
  for (const auto& [c, v] : x.entries)
    for (std::uint32_t j = 0; j < p.hidden; ++j)
      h[j] += p.w1[static_cast<std::size_t>(j) * p.input_dim + c] * v;
  double z = p.b2;
  for (std::uint32_t j = 0; j < p.hidden; ++j) {
    h[j] = std::max(h[j], 0.0);
    z += p.w2[j] * h[j];
  }
  if (hidden_out) *hidden_out = std::move(h);
  return z;
}

struct NeuralGrad {
  double loss = 0.0; // summed binary cross-entropy over the batch
  NeuralParams d;    // same shapes as the parameters
};

/// Summed cross-entropy over `rows` and its analytic gradient; the training
/// step applies this batch-sum gradient directly.
inline NeuralGrad neural_loss_grad(const NeuralParams& p, const FeatureMatrix& X,
                                   const std::vector<char>& y,
                                   const std::vector<std::size_t>& rows) {
  NeuralGrad g;
  g.d.hidden = p.hidden;
  g.d.input_dim = p.input_dim;
  g.d.w1.assign(p.w1.size(), 0.0);
  g.d.b1.assign(p.b1.size(), 0.0);
  g.d.w2.assign(p.w2.size(), 0.0);
  g.d.b2 = 0.0;

  std::vector<double> h;
  for (auto i : rows) {
    const SparseVector& x = X.rows[i];
    double z = neural_logit(p, x, &h);
    double yi = y[i];
    g.loss += softplus(z) - yi * z;
    double dz = sigmoid(z) - yi;
    g.d.b2 += dz;
    for (std::uint32_t j = 0; j < p.hidden; ++j) {
      g.d.w2[j] += dz * h[j];
      if (h[j] > 0.0) {
        double dh = dz * p.w2[j];
        g.d.b1[j] += dh;
        for (const auto& [c, v] : x.entries)
          g.d.w1[static_cast<std::size_t>(j) * p.input_dim + c] += dh * v;
      }
    }
  }
  return g;
}

/// Mini-batch gradient descent: per epoch the row order is reshuffled, each
/// batch applies the summed gradient scaled by eta.
inline NeuralParams fit_neural(const FeatureMatrix& X, const std::vector<char>& y,
                               std::uint32_t hidden, double eta, int epochs, std::size_t batch,
                               Rng& rng) {
  NeuralParams p = init_neural(hidden, X.dim(), rng);
  std::vector<std::size_t> order(X.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> batch_rows;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      std::size_t end = std::min(start + batch, order.size());
      batch_rows.assign(order.begin() + start, order.begin() + end);
      NeuralGrad g = neural_loss_grad(p, X, y, batch_rows);
      if (!std::isfinite(g.loss))
        raise(Errc::NonFiniteLoss, "neural network diverged at epoch " + std::to_string(epoch));
      for (std::size_t j = 0; j < p.w1.size(); ++j) p.w1[j] -= eta * g.d.w1[j];
      for (std::size_t j = 0; j < p.b1.size(); ++j) p.b1[j] -= eta * g.d.b1[j];
      for (std::size_t j = 0; j < p.w2.size(); ++j) p.w2[j] -= eta * g.d.w2[j];
      p.b2 -= eta * g.d.b2;
    }
  }
  return p;
}

} // namespace commentqc::models
