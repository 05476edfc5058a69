#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "commentqc/models/tree.hpp"
#include "commentqc/rng.hpp"
#include "commentqc/vectorize.hpp"

namespace commentqc::models {

struct ForestParams {
  std::vector<Tree> trees;
};

/// Bagged CART forest: each tree trains on an n-sized bootstrap sample and
/// considers ⌈√F⌉ candidate features per split. Every tree gets its own
/// seed stream, so the forest is independent of fit scheduling.
inline ForestParams fit_forest(const FeatureMatrix& X, const std::vector<char>& y, int n_trees,
                               int max_depth, std::uint64_t seed) {
  std::size_t n = X.rows.size();
  ColumnStore cols = ColumnStore::build(X);
  TreeConfig cfg;
  cfg.max_depth = max_depth;
  cfg.min_samples_split = 2;
  cfg.features_per_split =
      static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(X.dim()))));

  ForestParams params;
  params.trees.reserve(n_trees);
  TreeBuilder builder(X, cols, cfg);
  for (int b = 0; b < n_trees; ++b) {
    auto rng = make_rng(derive_seed(seed, "rf_tree", b));
    std::map<std::uint32_t, std::uint32_t> counts;
    for (std::size_t i = 0; i < n; ++i)
      ++counts[static_cast<std::uint32_t>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1))];
    std::vector<std::pair<std::uint32_t, std::uint32_t>> samples(counts.begin(), counts.end());
    params.trees.push_back(builder.build_classification(samples, y, &rng));
  }
  return params;
}

/// Fraction of trees voting Useful (per-tree vote: leaf majority, ties to
/// Useful).
inline double forest_score(const ForestParams& p, const SparseVector& x) {
  std::size_t votes = 0;
  for (const auto& tree : p.trees)
    if (tree_leaf(tree, x).value >= 0.5) ++votes;
  return static_cast<double>(votes) / static_cast<double>(p.trees.size());
}

} // namespace commentqc::models
