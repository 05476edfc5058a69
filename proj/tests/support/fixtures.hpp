#pragma once

// Shared synthetic fixtures and independent oracles for the test suites.
// Oracles here deliberately re-derive results from first principles and
// never call into the implementation paths they check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "commentqc/corpus.hpp"

namespace testsupport {

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      auto candidate = base / ("commentqc_" + tag + "_" + std::to_string(::getpid()) + "_" +
                               std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path = candidate;
        return;
      }
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s;
}

// ---------------------------------------------------------------------------
// Synthetic corpora

/// Linearly separable corpus: every Useful comment draws only from the
/// "good" token pool, every Not Useful comment only from the "bad" pool,
/// contexts are class-neutral. A weight vector +1 on good tokens / -1 on
/// bad tokens separates it with positive margin through the origin.
inline commentqc::Corpus separable_corpus(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> good = {"clear", "explains", "precise", "helpful"};
  static const std::vector<std::string> bad = {"stale", "noise", "obvious", "clutter"};
  static const std::vector<std::string> neutral = {"buffer", "loop", "index", "size", "ptr"};

  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<std::string>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  };

  commentqc::Corpus corpus;
  corpus.provenance = commentqc::Provenance::Seed;
  for (std::size_t i = 0; i < n; ++i) {
    bool useful = (i % 2) == 0;
    const auto& pool = useful ? good : bad;
    std::string comment;
    std::size_t n_class = 4 + (rng() % 3);
    for (std::size_t t = 0; t < n_class; ++t) comment += (t ? " " : "") + pick(pool);
    if (rng() % 2) comment += " " + pick(neutral);

    std::string context = pick(neutral) + " " + pick(neutral);
    corpus.pairs.push_back({"row" + std::to_string(i), comment, context,
                            useful ? commentqc::Label::Useful : commentqc::Label::NotUseful});
  }
  return corpus;
}

/// Random corpus with both classes present (counts chosen uniformly but
/// each class gets at least min_per_class rows).
inline commentqc::Corpus random_corpus(std::mt19937_64& rng, std::size_t n,
                                       std::size_t min_per_class) {
  static const std::vector<std::string> words = {"alpha", "beta",  "gamma", "delta", "omega",
                                                 "sigma", "kappa", "theta", "zeta",  "iota"};
  commentqc::Corpus corpus;
  std::size_t n_useful =
      min_per_class + rng() % (n - 2 * min_per_class + 1); // in [min, n-min]
  for (std::size_t i = 0; i < n; ++i) {
    std::string comment, context;
    std::size_t len = 1 + rng() % 5;
    for (std::size_t t = 0; t < len; ++t)
      comment += (t ? " " : "") + words[rng() % words.size()];
    len = 1 + rng() % 4;
    for (std::size_t t = 0; t < len; ++t)
      context += (t ? " " : "") + words[rng() % words.size()];
    corpus.pairs.push_back({"r" + std::to_string(i), comment, context,
                            i < n_useful ? commentqc::Label::Useful : commentqc::Label::NotUseful});
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Independent oracles

struct OracleMetrics {
  double precision = 0, recall = 0, f1 = 0;
};

/// Straight enumeration of the metric definitions, independent of the
/// evaluate module.
inline OracleMetrics oracle_metrics(const std::vector<commentqc::Label>& y_true,
                                    const std::vector<commentqc::Label>& y_pred) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    bool t = y_true[i] == commentqc::Label::Useful;
    bool p = y_pred[i] == commentqc::Label::Useful;
    if (t && p) tp += 1;
    if (!t && p) fp += 1;
    if (t && !p) fn += 1;
  }
  OracleMetrics m;
  m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

/// Dense TF-IDF recomputation from the raw definition: counts, document
/// frequencies, idf = ln((1+N)/(1+df)) + 1, L2 row normalization.
/// Vocabulary order: first-seen over the fitting docs, min_df filter.
inline std::pair<std::vector<std::string>, std::vector<std::vector<double>>> oracle_tfidf(
    const std::vector<std::vector<std::string>>& fit_docs,
    const std::vector<std::vector<std::string>>& transform_docs, std::size_t min_df) {
  std::vector<std::string> terms;
  std::map<std::string, std::size_t> df;
  for (const auto& doc : fit_docs) {
    std::set<std::string> seen;
    for (const auto& tok : doc)
      if (seen.insert(tok).second) {
        if (!df.count(tok)) terms.push_back(tok);
        ++df[tok];
      }
  }
  std::vector<std::string> vocab;
  for (const auto& t : terms)
    if (df[t] >= min_df) vocab.push_back(t);

  double n_docs = static_cast<double>(fit_docs.size());
  std::vector<std::vector<double>> rows;
  for (const auto& doc : transform_docs) {
    std::vector<double> row(vocab.size(), 0.0);
    for (std::size_t j = 0; j < vocab.size(); ++j) {
      double tf = 0;
      for (const auto& tok : doc)
        if (tok == vocab[j]) tf += 1;
      double idf = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[vocab[j]]))) + 1.0;
      row[j] = tf * idf;
    }
    double norm = 0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0)
      for (double& v : row) v /= norm;
    rows.push_back(std::move(row));
  }
  return {vocab, rows};
}

} // namespace testsupport
