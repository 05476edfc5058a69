#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "commentqc/rng.hpp"
#include "commentqc/vectorize.hpp"

namespace commentqc::models {

struct TreeNode {
  std::int32_t feature = -1; // -1 => leaf
  double threshold = 0.0;    // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;            // leaf: useful fraction / regression value
  std::uint64_t n_useful = 0;    // leaf class counts (classification trees)
  std::uint64_t n_total = 0;
};

struct Tree {
  std::vector<TreeNode> nodes; // root at index 0

  bool empty() const { return nodes.empty(); }
};

inline double feature_value(const SparseVector& x, std::uint32_t feature) {
  auto it = std::lower_bound(x.entries.begin(), x.entries.end(), feature,
                             [](const auto& e, std::uint32_t f) { return e.first < f; });
  return (it != x.entries.end() && it->first == feature) ? it->second : 0.0;
}

inline const TreeNode& tree_leaf(const Tree& tree, const SparseVector& x) {
  std::size_t node = 0;
  while (tree.nodes[node].feature >= 0) {
    const auto& n = tree.nodes[node];
    node = feature_value(x, static_cast<std::uint32_t>(n.feature)) <= n.threshold
               ? static_cast<std::size_t>(n.left)
               : static_cast<std::size_t>(n.right);
  }
  return tree.nodes[node];
}

/// Per-feature (row, value) lists for fast split search over sparse data.
struct ColumnStore {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> cols;
  std::size_t n_rows = 0;

  static ColumnStore build(const FeatureMatrix& X) {
    ColumnStore cs;
    cs.n_rows = X.rows.size();
    cs.cols.resize(X.dim());
    for (std::uint32_t r = 0; r < X.rows.size(); ++r)
      for (const auto& [c, v] : X.rows[r].entries) cs.cols[c].emplace_back(r, v);
    return cs;
  }
};

struct TreeConfig {
  int max_depth = 10;
  std::uint64_t min_samples_split = 2;
  std::uint32_t features_per_split = 0; // 0 = consider every feature
};

/// CART builder shared by the decision tree, random forest and boosting
/// models. Classification splits minimize weighted Gini impurity,
/// regression splits minimize within-node squared error. Ties are broken
/// toward the lowest feature index, then the lowest threshold, and split
/// statistics are aggregated per distinct feature value, so the result does
/// not depend on training row order (exactly so for integer-weighted
/// classification).
class TreeBuilder {
public:
  TreeBuilder(const FeatureMatrix& X, const ColumnStore& cols, TreeConfig cfg)
      : X_(X), cols_(cols), cfg_(cfg) {}

  /// samples: (row, weight) sorted by row, weights >= 1. y_class: 0/1 per row.
  Tree build_classification(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& samples,
                            const std::vector<char>& y_class, Rng* rng = nullptr) {
    y_class_ = &y_class;
    y_value_ = nullptr;
    return build(samples, rng);
  }

  /// samples as above. y_value: regression target per row.
  Tree build_regression(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& samples,
                        const std::vector<double>& y_value, Rng* rng = nullptr) {
    y_class_ = nullptr;
    y_value_ = &y_value;
    return build(samples, rng);
  }

private:
  using Samples = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

  struct Totals {
    double w = 0;
    double s = 0; // Σ weight · target
  };

  double target(std::uint32_t row) const {
    return y_class_ ? static_cast<double>((*y_class_)[row]) : (*y_value_)[row];
  }

  // Impurity mass of one side: lower is better, comparable across sides.
  // Gini: w·(1 − p₁² − p₀²) = w − (s² + (w−s)²)/w.  MSE: SSE = Σwy² − s²/w,
  // where the Σwy² term is constant per node and dropped.
  double side_score(double w, double s) const {
    if (y_class_) return w - (s * s + (w - s) * (w - s)) / w;
    return -(s * s) / w;
  }

  Tree build(const Samples& samples, Rng* rng) {
    Tree tree;
    build_node(tree, samples, 0, rng);
    return tree;
  }

  Totals totals_of(const Samples& samples) const {
    Totals t;
    for (const auto& [row, w] : samples) {
      t.w += w;
      t.s += w * target(row);
    }
    return t;
  }

  std::int32_t make_leaf(Tree& tree, const Samples& samples, const Totals& t) const {
    TreeNode leaf;
    leaf.feature = -1;
    if (y_class_) {
      std::uint64_t useful = 0, total = 0;
      for (const auto& [row, w] : samples) {
        total += w;
        if ((*y_class_)[row]) useful += w;
      }
      leaf.n_useful = useful;
      leaf.n_total = total;
      leaf.value = static_cast<double>(useful) / static_cast<double>(total);
    } else {
      leaf.value = t.s / t.w;
      leaf.n_total = static_cast<std::uint64_t>(t.w);
    }
    tree.nodes.push_back(leaf);
    return static_cast<std::int32_t>(tree.nodes.size() - 1);
  }

  std::vector<std::uint32_t> candidate_features(Rng* rng) const {
    std::uint32_t n_features = static_cast<std::uint32_t>(cols_.cols.size());
    if (cfg_.features_per_split == 0 || cfg_.features_per_split >= n_features || rng == nullptr) {
      std::vector<std::uint32_t> all(n_features);
      for (std::uint32_t f = 0; f < n_features; ++f) all[f] = f;
      return all;
    }
    // Floyd's sampling without replacement, then sorted so the
    // lowest-feature tie rule applies within the subset.
    std::vector<std::uint32_t> picked;
    picked.reserve(cfg_.features_per_split);
    for (std::uint32_t j = n_features - cfg_.features_per_split; j < n_features; ++j) {
      auto t = static_cast<std::uint32_t>(uniform_int(*rng, 0, j));
      if (std::find(picked.begin(), picked.end(), t) != picked.end())
        picked.push_back(j);
      else
        picked.push_back(t);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
  }

  struct BestSplit {
    bool found = false;
    std::uint32_t feature = 0;
    double threshold = 0;
    double score = std::numeric_limits<double>::infinity();
  };

  BestSplit find_split(const Samples& samples, const Totals& totals, Rng* rng) const {
    BestSplit best;
    auto features = candidate_features(rng);
    double parent = side_score(totals.w, totals.s);

    std::vector<std::array<double, 3>> groups; // value, weight, weighted target
    for (auto f : features) {
      groups.clear();
      const auto& col = cols_.cols[f];
      // two-pointer intersection of the node's rows with the column's rows
      double nz_w = 0, nz_s = 0;
      std::size_t ci = 0;
      for (const auto& [row, w] : samples) {
        while (ci < col.size() && col[ci].first < row) ++ci;
        if (ci < col.size() && col[ci].first == row) {
          double wt = w, ws = w * target(row);
          groups.push_back({col[ci].second, wt, ws});
          nz_w += wt;
          nz_s += ws;
        }
      }
      double zero_w = totals.w - nz_w;
      if (zero_w > 0) groups.push_back({0.0, zero_w, totals.s - nz_s});
      if (groups.size() < 2) continue;
      std::sort(groups.begin(), groups.end(),
                [](const auto& a, const auto& b) { return a[0] < b[0]; });
      // merge equal values
      std::size_t out = 0;
      for (std::size_t i = 1; i < groups.size(); ++i) {
        if (groups[i][0] == groups[out][0]) {
          groups[out][1] += groups[i][1];
          groups[out][2] += groups[i][2];
        } else {
          groups[++out] = groups[i];
        }
      }
      groups.resize(out + 1);
      if (groups.size() < 2) continue;

      double wl = 0, sl = 0;
      for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
        wl += groups[g][1];
        sl += groups[g][2];
        double wr = totals.w - wl;
        double sr = totals.s - sl;
        double score = side_score(wl, sl) + side_score(wr, sr);
        if (score < best.score && score < parent) {
          best.found = true;
          best.feature = f;
          best.threshold = (groups[g][0] + groups[g + 1][0]) / 2.0;
          best.score = score;
        }
      }
    }
    return best;
  }

  std::int32_t build_node(Tree& tree, const Samples& samples, int depth, Rng* rng) {
    Totals totals = totals_of(samples);
    bool pure = y_class_ ? (totals.s == 0 || totals.s == totals.w) : false;
    if (depth >= cfg_.max_depth || totals.w < static_cast<double>(cfg_.min_samples_split) || pure)
      return make_leaf(tree, samples, totals);

    BestSplit split = find_split(samples, totals, rng);
    if (!split.found) return make_leaf(tree, samples, totals);

    Samples left, right;
    for (const auto& sample : samples) {
      if (feature_value(X_.rows[sample.first], split.feature) <= split.threshold)
        left.push_back(sample);
      else
        right.push_back(sample);
    }
    // a valid threshold always separates at least one group per side
    if (left.empty() || right.empty()) return make_leaf(tree, samples, totals);

    TreeNode node;
    node.feature = static_cast<std::int32_t>(split.feature);
    node.threshold = split.threshold;
    tree.nodes.push_back(node);
    auto index = static_cast<std::int32_t>(tree.nodes.size() - 1);
    auto l = build_node(tree, left, depth + 1, rng);
    auto r = build_node(tree, right, depth + 1, rng);
    tree.nodes[index].left = l;
    tree.nodes[index].right = r;
    return index;
  }

  const FeatureMatrix& X_;
  const ColumnStore& cols_;
  TreeConfig cfg_;
  const std::vector<char>* y_class_ = nullptr;
  const std::vector<double>* y_value_ = nullptr;
};

} // namespace commentqc::models
