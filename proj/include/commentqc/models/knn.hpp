#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "commentqc/vectorize.hpp"

namespace commentqc::models {

struct KnnParams {
  std::vector<SparseVector> train_rows;
  std::vector<char> train_labels; // 1 = Useful
  std::uint32_t k = 5;
};

struct KnnVote {
  std::size_t votes_useful = 0;
  std::size_t k_effective = 0;
  char nearest_label = 0;
};

/// Majority vote of the k nearest training rows by cosine distance.
/// Distance ties prefer the lower training row index; an even vote split is
/// resolved by the single nearest neighbor.
inline KnnVote knn_vote(const KnnParams& p, const SparseVector& x) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(p.train_rows.size());
  for (std::size_t i = 0; i < p.train_rows.size(); ++i)
    dist.emplace_back(1.0 - cosine_similarity(x, p.train_rows[i]), i);
  std::size_t k = std::min<std::size_t>(p.k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  KnnVote vote;
  vote.k_effective = k;
  vote.nearest_label = p.train_labels[dist[0].second];
  for (std::size_t j = 0; j < k; ++j)
    if (p.train_labels[dist[j].second]) ++vote.votes_useful;
  return vote;
}

inline double knn_score(const KnnParams& p, const SparseVector& x) {
  KnnVote v = knn_vote(p, x);
  return static_cast<double>(v.votes_useful) / static_cast<double>(v.k_effective);
}

inline bool knn_predict_useful(const KnnParams& p, const SparseVector& x) {
  KnnVote v = knn_vote(p, x);
  if (2 * v.votes_useful == v.k_effective) return v.nearest_label != 0;
  return 2 * v.votes_useful > v.k_effective;
}

} // namespace commentqc::models
