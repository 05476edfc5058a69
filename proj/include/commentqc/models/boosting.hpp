#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "commentqc/error.hpp"
#include "commentqc/models/linear.hpp"
#include "commentqc/models/tree.hpp"
#include "commentqc/vectorize.hpp"

namespace commentqc::models {

struct BoostParams {
  double f0 = 0.0; // log-odds of the training prevalence
  std::vector<Tree> trees; // leaf values already include shrinkage
};

inline double boost_raw_score(const BoostParams& p, const SparseVector& x) {
  double f = p.f0;
  for (const auto& tree : p.trees) f += tree_leaf(tree, x).value;
  return f;
}

/// Gradient boosting on the logistic loss: every round fits a shallow
/// regression tree to the residuals y − σ(F) and applies a per-leaf Newton
/// step Σr / Σ p(1−p), scaled by the shrinkage factor.
inline BoostParams fit_boosting(const FeatureMatrix& X, const std::vector<char>& y, int rounds,
                                int depth, double shrinkage) {
  std::size_t n = X.rows.size();
  BoostParams params;

  double prevalence = 0;
  for (char yi : y) prevalence += yi;
  prevalence /= static_cast<double>(n);
  double clamped = std::min(std::max(prevalence, 1e-12), 1.0 - 1e-12);
  params.f0 = std::log(clamped / (1.0 - clamped));

  ColumnStore cols = ColumnStore::build(X);
  TreeConfig cfg;
  cfg.max_depth = depth;
  cfg.min_samples_split = 2;
  TreeBuilder builder(X, cols, cfg);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> all_rows(n);
  for (std::uint32_t i = 0; i < n; ++i) all_rows[i] = {i, 1};

  std::vector<double> score(n, params.f0);
  std::vector<double> residual(n), hessian(n);
  for (int m = 0; m < rounds; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(score[i]);
      residual[i] = static_cast<double>(y[i]) - p;
      hessian[i] = p * (1.0 - p);
    }
    Tree tree = builder.build_regression(all_rows, residual);

    // Newton leaf values, computed over the rows each leaf receives.
    std::vector<double> leaf_r(tree.nodes.size(), 0.0), leaf_h(tree.nodes.size(), 0.0);
    std::vector<std::size_t> leaf_of(n);
    for (std::size_t i = 0; i < n; ++i) {
      const TreeNode& leaf = tree_leaf(tree, X.rows[i]);
      auto idx = static_cast<std::size_t>(&leaf - tree.nodes.data());
      leaf_of[i] = idx;
      leaf_r[idx] += residual[i];
      leaf_h[idx] += hessian[i];
    }
    for (std::size_t j = 0; j < tree.nodes.size(); ++j) {
      if (tree.nodes[j].feature >= 0) continue;
      tree.nodes[j].value = shrinkage * leaf_r[j] / std::max(leaf_h[j], 1e-12);
    }
    for (std::size_t i = 0; i < n; ++i) {
      score[i] += tree.nodes[leaf_of[i]].value;
      if (!std::isfinite(score[i]))
        raise(Errc::NonFiniteLoss, "boosting diverged at round " + std::to_string(m));
    }
    params.trees.push_back(std::move(tree));
  }
  return params;
}

} // namespace commentqc::models
