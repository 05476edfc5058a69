#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "commentqc/corpus.hpp"
#include "commentqc/error.hpp"

namespace commentqc {

/// Whitespace split of already-normalized text.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) tokens.emplace_back(s.substr(start, i - start));
  }
  return tokens;
}

struct Vocabulary {
  std::unordered_map<std::string, std::uint32_t> term_index; // term -> dense column
  std::vector<std::string> terms;                            // column -> term
  std::vector<std::size_t> doc_freq;                         // column -> document frequency
  std::size_t n_docs = 0;                                    // fitting corpus size

  std::size_t size() const { return terms.size(); }

  double idf(std::uint32_t column) const {
    return std::log((1.0 + static_cast<double>(n_docs)) /
                    (1.0 + static_cast<double>(doc_freq[column]))) + 1.0;
  }
};

/// Terms appearing in at least min_df documents, indexed in first-seen
/// order over the fitting corpus.
inline Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs,
                                   std::size_t min_df = 1) {
  if (min_df < 1) raise(Errc::InvalidArgument, "min_df must be >= 1");
  std::unordered_map<std::string, std::size_t> df;
  std::vector<std::string> first_seen;
  for (const auto& doc : docs) {
    std::unordered_set<std::string_view> in_doc;
    for (const auto& tok : doc) {
      if (in_doc.insert(tok).second) {
        auto [it, inserted] = df.emplace(tok, 0);
        if (inserted) first_seen.push_back(tok);
        ++it->second;
      }
    }
  }
  Vocabulary vocab;
  vocab.n_docs = docs.size();
  for (const auto& term : first_seen) {
    if (df[term] >= min_df) {
      vocab.term_index.emplace(term, static_cast<std::uint32_t>(vocab.terms.size()));
      vocab.terms.push_back(term);
      vocab.doc_freq.push_back(df[term]);
    }
  }
  if (vocab.terms.empty()) raise(Errc::EmptyVocabulary, "no term reaches min_df=" + std::to_string(min_df));
  return vocab;
}

/// Sparse row vector; entries sorted by column, zeros never stored.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::uint32_t dim = 0;

  double l2_norm() const {
    double s = 0;
    for (auto& [c, v] : entries) s += v * v;
    return std::sqrt(s);
  }
};

inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    if (a.entries[i].first < b.entries[j].first) ++i;
    else if (a.entries[i].first > b.entries[j].first) ++j;
    else s += a.entries[i++].second * b.entries[j++].second;
  }
  return s;
}

inline double dot(const SparseVector& a, const std::vector<double>& dense) {
  double s = 0;
  for (auto& [c, v] : a.entries) s += v * dense[c];
  return s;
}

/// Cosine similarity with the convention that a zero vector is similar to
/// nothing (similarity 0).
inline double cosine_similarity(const SparseVector& a, const SparseVector& b) {
  double na = a.l2_norm(), nb = b.l2_norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

enum class Scheme { BoW, TfIdf };

inline const char* scheme_name(Scheme s) { return s == Scheme::BoW ? "bow" : "tfidf"; }

inline std::optional<Scheme> parse_scheme(std::string_view s) {
  if (s == "bow") return Scheme::BoW;
  if (s == "tfidf") return Scheme::TfIdf;
  return std::nullopt;
}

/// Raw term counts over the frozen vocabulary; out-of-vocabulary tokens are
/// ignored.
inline SparseVector bow_vector(const std::vector<std::string>& doc, const Vocabulary& vocab) {
  std::unordered_map<std::uint32_t, double> counts;
  for (const auto& tok : doc) {
    auto it = vocab.term_index.find(tok);
    if (it != vocab.term_index.end()) counts[it->second] += 1.0;
  }
  SparseVector v;
  v.dim = static_cast<std::uint32_t>(vocab.size());
  v.entries.assign(counts.begin(), counts.end());
  std::sort(v.entries.begin(), v.entries.end());
  return v;
}

/// weight(t, d) = tf * (ln((1 + N) / (1 + df)) + 1), then L2 row
/// normalization; empty documents stay all-zero.
inline SparseVector tfidf_vector(const std::vector<std::string>& doc, const Vocabulary& vocab) {
  SparseVector v = bow_vector(doc, vocab);
  for (auto& [c, tf] : v.entries) tf *= vocab.idf(c);
  double norm = v.l2_norm();
  if (norm > 0) {
    for (auto& [c, w] : v.entries) w /= norm;
  }
  return v;
}

struct FeatureMatrix {
  std::vector<SparseVector> rows;
  Scheme scheme = Scheme::TfIdf;
  Vocabulary vocab;

  std::size_t n_rows() const { return rows.size(); }
  std::uint32_t dim() const { return static_cast<std::uint32_t>(vocab.size()); }
};

inline FeatureMatrix tfidf_matrix(const std::vector<std::vector<std::string>>& docs,
                                  const Vocabulary& vocab) {
  FeatureMatrix m;
  m.scheme = Scheme::TfIdf;
  m.vocab = vocab;
  m.rows.reserve(docs.size());
  for (const auto& doc : docs) m.rows.push_back(tfidf_vector(doc, vocab));
  return m;
}

/// The text a pair contributes to vectorization: comment and surrounding
/// context joined.
inline std::string pair_document(const LabeledPair& p) {
  return p.comment_text + " " + p.code_context;
}

/// Vectorizes the whole corpus with a vocabulary fitted on `fit_on` rows
/// only, so transform rows outside the fitting subset can never leak terms
/// into the vocabulary.
inline FeatureMatrix featurize_corpus(const Corpus& corpus, Scheme scheme,
                                      const std::vector<std::size_t>& fit_on,
                                      std::size_t min_df = 2) {
  if (fit_on.empty()) raise(Errc::InvalidArgument, "fit_on subset must be non-empty");
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& p : corpus.pairs) docs.push_back(tokenize(pair_document(p)));

  std::vector<std::vector<std::string>> fit_docs;
  fit_docs.reserve(fit_on.size());
  for (auto i : fit_on) {
    if (i >= docs.size()) raise(Errc::InvalidArgument, "fit_on index out of range");
    fit_docs.push_back(docs[i]);
  }
  Vocabulary vocab = build_vocabulary(fit_docs, min_df);

  FeatureMatrix m;
  m.scheme = scheme;
  m.vocab = std::move(vocab);
  m.rows.reserve(docs.size());
  for (const auto& doc : docs)
    m.rows.push_back(scheme == Scheme::BoW ? bow_vector(doc, m.vocab) : tfidf_vector(doc, m.vocab));
  return m;
}

/// Oracle-diff dump: one line per row, `row col:weight col:weight ...`,
/// columns ascending, 6 significant digits.
inline void dump_matrix(const FeatureMatrix& m, std::ostream& out) {
  char buf[64];
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    out << r;
    for (const auto& [c, w] : m.rows[r].entries) {
      std::snprintf(buf, sizeof buf, " %u:%.6g", c, w);
      out << buf;
    }
    out << '\n';
  }
}

} // namespace commentqc
