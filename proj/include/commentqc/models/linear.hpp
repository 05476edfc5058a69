#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "commentqc/error.hpp"
#include "commentqc/vectorize.hpp"

namespace commentqc::models {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct LogRegParams {
  std::vector<double> weights;
  double bias = 0.0;
};

struct LogRegGrad {
  double loss = 0.0;
  std::vector<double> d_weights;
  double d_bias = 0.0;
};

/// Mean binary cross-entropy plus (λ/2)·‖w‖² (bias unregularized) and its
/// analytic gradient. Kept as a standalone function so the gradient can be
/// checked against finite differences of the same loss.
inline LogRegGrad logreg_loss_grad(const LogRegParams& params, const FeatureMatrix& X,
                                   const std::vector<char>& y, double lambda) {
  std::size_t n = X.rows.size();
  LogRegGrad g;
  g.d_weights.assign(params.weights.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double z = dot(X.rows[i], params.weights) + params.bias;
    double yi = y[i];
    g.loss += softplus(z) - yi * z;
    double err = sigmoid(z) - yi;
    for (const auto& [c, v] : X.rows[i].entries) g.d_weights[c] += err * v;
    g.d_bias += err;
  }
  double inv_n = 1.0 / static_cast<double>(n);
  g.loss *= inv_n;
  g.d_bias *= inv_n;
  double reg = 0;
  for (std::size_t j = 0; j < params.weights.size(); ++j) {
    g.d_weights[j] = g.d_weights[j] * inv_n + lambda * params.weights[j];
    reg += params.weights[j] * params.weights[j];
  }
  g.loss += 0.5 * lambda * reg;
  return g;
}

/// Full-batch gradient descent on the regularized cross-entropy,
/// zero-initialized. Useful encodes as 1.
inline LogRegParams fit_logreg(const FeatureMatrix& X, const std::vector<char>& y, double eta,
                               double lambda, int epochs, std::vector<double>* loss_trace = nullptr) {
  LogRegParams params;
  params.weights.assign(X.dim(), 0.0);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    LogRegGrad g = logreg_loss_grad(params, X, y, lambda);
    if (!std::isfinite(g.loss))
      raise(Errc::NonFiniteLoss, "logistic regression diverged at epoch " + std::to_string(epoch));
    if (loss_trace) loss_trace->push_back(g.loss);
    for (std::size_t j = 0; j < params.weights.size(); ++j) params.weights[j] -= eta * g.d_weights[j];
    params.bias -= eta * g.d_bias;
  }
  return params;
}

struct SvmParams {
  std::vector<double> weights; // no bias term, classic Pegasos formulation
};

/// Deterministic full-batch Pegasos: subgradient steps η_t = 1/(λt) on the
/// hinge loss with L2 regularization, followed by projection onto the ball
/// of radius 1/√λ. Labels are mapped Useful → +1, Not Useful → −1.
inline SvmParams fit_svm(const FeatureMatrix& X, const std::vector<char>& y, double lambda,
                         int epochs) {
  std::size_t n = X.rows.size();
  SvmParams params;
  params.weights.assign(X.dim(), 0.0);
  std::vector<double> step(X.dim());
  double cap = 1.0 / std::sqrt(lambda);
  for (int t = 1; t <= epochs; ++t) {
    double eta = 1.0 / (lambda * static_cast<double>(t));
    std::fill(step.begin(), step.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double yi = y[i] ? 1.0 : -1.0;
      double margin = yi * dot(X.rows[i], params.weights);
      if (margin < 1.0)
        for (const auto& [c, v] : X.rows[i].entries) step[c] += yi * v;
    }
    double scale = 1.0 - eta * lambda;
    double inv_n = eta / static_cast<double>(n);
    double norm_sq = 0;
    for (std::size_t j = 0; j < params.weights.size(); ++j) {
      params.weights[j] = scale * params.weights[j] + inv_n * step[j];
      norm_sq += params.weights[j] * params.weights[j];
    }
    if (!std::isfinite(norm_sq))
      raise(Errc::NonFiniteLoss, "svm diverged at step " + std::to_string(t));
    double norm = std::sqrt(norm_sq);
    if (norm > cap) {
      double shrink = cap / norm;
      for (auto& w : params.weights) w *= shrink;
    }
  }
  return params;
}

} // namespace commentqc::models
