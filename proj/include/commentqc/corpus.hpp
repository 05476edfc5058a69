#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "commentqc/csv.hpp"
#include "commentqc/error.hpp"
#include "commentqc/rng.hpp"

namespace commentqc {

enum class Label { Useful, NotUseful };

inline const char* label_name(Label l) { return l == Label::Useful ? "Useful" : "Not Useful"; }

/// Accepted spellings (case-insensitive, surrounding whitespace ignored):
/// "useful", "not useful", "not_useful", "notuseful".
inline std::optional<Label> parse_label(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string low;
  low.reserve(e - b);
  for (std::size_t i = b; i < e; ++i)
    low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[i]))));
  if (low == "useful") return Label::Useful;
  if (low == "not useful" || low == "not_useful" || low == "notuseful") return Label::NotUseful;
  return std::nullopt;
}

enum class Provenance { Seed, Auxiliary, Merged };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Seed: return "Seed";
    case Provenance::Auxiliary: return "Auxiliary";
    case Provenance::Merged: return "Merged";
  }
  return "?";
}

struct LabeledPair {
  std::string id;
  std::string comment_text;
  std::string code_context;
  Label label = Label::Useful;

  bool operator==(const LabeledPair&) const = default;
};

struct Corpus {
  std::vector<LabeledPair> pairs;
  Provenance provenance = Provenance::Seed;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

/// Row of an extraction CSV whose label column is still blank.
struct UnlabeledRow {
  std::string id;
  std::string comment_text;
  std::string code_context;
};

inline constexpr const char* kCorpusHeader = "id,comment,code_context,label";
inline constexpr const char* kAuxIdPrefix = "aux:";

namespace detail {

inline void check_corpus_header(const std::vector<std::string>& header) {
  static const std::vector<std::string> want = {"id", "comment", "code_context", "label"};
  if (header != want) {
    std::string got;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) got.push_back(',');
      got += header[i];
    }
    raise(Errc::MissingColumn, "expected header '" + std::string(kCorpusHeader) + "', got '" + got + "'");
  }
}

} // namespace detail

/// Loads a labeled corpus CSV. Row order is preserved. Auxiliary rows get
/// their ids namespaced with "aux:" so a later merge cannot collide with
/// seed ids.
inline Corpus load_corpus(std::istream& in, Provenance provenance, const std::string& origin = "<stream>") {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) raise(Errc::MissingColumn, origin + ": empty file, expected header '" + kCorpusHeader + "'");
  detail::check_corpus_header(*header);

  Corpus corpus;
  corpus.provenance = provenance;
  std::unordered_set<std::string> seen;
  std::size_t row_no = 0;
  while (auto row = reader.next()) {
    ++row_no;
    if (row->size() != 4)
      raise(Errc::MalformedRow, origin + ": row " + std::to_string(row_no) + " has " +
                                    std::to_string(row->size()) + " fields, expected 4");
    LabeledPair p;
    p.id = (*row)[0];
    if (provenance == Provenance::Auxiliary) p.id = kAuxIdPrefix + p.id;
    p.comment_text = (*row)[1];
    p.code_context = (*row)[2];
    auto label = parse_label((*row)[3]);
    if (!label)
      raise(Errc::UnparsableLabel, origin + ": row " + std::to_string(row_no) + " label '" + (*row)[3] + "'");
    p.label = *label;
    if (p.id.empty())
      raise(Errc::MalformedRow, origin + ": row " + std::to_string(row_no) + " has empty id");
    if (!seen.insert(p.id).second)
      raise(Errc::DuplicateId, origin + ": id '" + p.id + "' (row " + std::to_string(row_no) + ")");
    corpus.pairs.push_back(std::move(p));
  }
  return corpus;
}

inline Corpus load_corpus(const std::string& path, Provenance provenance) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open " + path);
  return load_corpus(in, provenance, path);
}

inline void save_corpus(const Corpus& corpus, std::ostream& out) {
  out << kCorpusHeader << "\n";
  for (const auto& p : corpus.pairs)
    out << csv::join_row({p.id, p.comment_text, p.code_context, label_name(p.label)});
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open " + path + " for writing");
  save_corpus(corpus, out);
}

/// Loads an extraction CSV (same header, label column ignored).
inline std::vector<UnlabeledRow> load_unlabeled(std::istream& in, const std::string& origin = "<stream>") {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) raise(Errc::MissingColumn, origin + ": empty file, expected header '" + kCorpusHeader + "'");
  detail::check_corpus_header(*header);
  std::vector<UnlabeledRow> rows;
  std::size_t row_no = 0;
  while (auto row = reader.next()) {
    ++row_no;
    if (row->size() != 4)
      raise(Errc::MalformedRow, origin + ": row " + std::to_string(row_no) + " has " +
                                    std::to_string(row->size()) + " fields, expected 4");
    rows.push_back({(*row)[0], (*row)[1], (*row)[2]});
  }
  return rows;
}

inline std::vector<UnlabeledRow> load_unlabeled(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open " + path);
  return load_unlabeled(in, path);
}

/// Seed rows first, auxiliary rows after; id sets must be disjoint.
inline Corpus merge(const Corpus& seed, const Corpus& aux) {
  std::unordered_set<std::string> ids;
  ids.reserve(seed.size());
  for (const auto& p : seed.pairs) ids.insert(p.id);
  for (const auto& p : aux.pairs)
    if (ids.count(p.id)) raise(Errc::DuplicateId, "id '" + p.id + "' present in both corpora");
  Corpus out;
  out.provenance = Provenance::Merged;
  out.pairs.reserve(seed.size() + aux.size());
  out.pairs.insert(out.pairs.end(), seed.pairs.begin(), seed.pairs.end());
  out.pairs.insert(out.pairs.end(), aux.pairs.begin(), aux.pairs.end());
  return out;
}

struct FoldPlan {
  int k = 0;
  std::map<std::string, int> assignment; // pair id -> fold index in [0, k)
};

/// Stratified k-fold assignment. Each class is shuffled by the seed, then
/// dealt round-robin into folds through a rotating global offset, which
/// keeps both the per-class counts and the overall fold sizes within one
/// of each other.
inline FoldPlan stratified_kfold(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 2) raise(Errc::InvalidArgument, "k must be >= 2, got " + std::to_string(k));
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i)
    by_class[corpus.pairs[i].label == Label::Useful ? 0 : 1].push_back(i);
  for (int c = 0; c < 2; ++c) {
    std::size_t n = by_class[c].size();
    if (n > 0 && n < static_cast<std::size_t>(k)) {
      Label l = (c == 0) ? Label::Useful : Label::NotUseful;
      raise(Errc::TooFewSamples, std::string("class '") + label_name(l) + "' has " +
                                     std::to_string(n) + " members, need at least " + std::to_string(k));
    }
  }

  auto rng = make_rng(derive_seed(seed, "stratified_kfold", k));
  FoldPlan plan;
  plan.k = k;
  int offset = 0;
  for (int c = 0; c < 2; ++c) {
    auto& group = by_class[c];
    std::shuffle(group.begin(), group.end(), rng);
    for (std::size_t i = 0; i < group.size(); ++i) {
      int fold = static_cast<int>((offset + i) % static_cast<std::size_t>(k));
      plan.assignment.emplace(corpus.pairs[group[i]].id, fold);
    }
    offset = static_cast<int>((offset + group.size()) % static_cast<std::size_t>(k));
  }
  return plan;
}

/// Audit export, `id,fold`, sorted by id.
inline void save_fold_plan(const FoldPlan& plan, std::ostream& out) {
  out << "id,fold\n";
  for (const auto& [id, fold] : plan.assignment)
    out << csv::join_row({id, std::to_string(fold)});
}

} // namespace commentqc
