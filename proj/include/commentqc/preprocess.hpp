#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "commentqc/corpus.hpp"
#include "commentqc/error.hpp"

namespace commentqc {

struct PreprocessConfig {
  double z_threshold = 3.0;
  bool lowercase = true;
  bool strip_punct = true;
};

struct PreprocessReport {
  std::size_t rows_in = 0;
  std::size_t dropped_incomplete = 0;
  std::size_t dropped_outliers = 0;
  std::size_t rows_out = 0;
};

namespace detail {

inline bool is_blank(std::string_view s) {
  for (unsigned char c : s)
    if (!std::isspace(c)) return false;
  return true;
}

// Code-point count (UTF-8 continuation bytes don't count).
inline std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

/// Keep mask for |z| <= threshold on every length column. Population
/// standard deviation; a zero-variance column contributes z = 0 for all
/// rows.
inline std::vector<char> zscore_keep_mask(const std::vector<std::vector<std::size_t>>& columns,
                                          double z_threshold) {
  if (columns.empty() || columns[0].empty()) return {};
  std::size_t n = columns[0].size();
  std::vector<char> keep(n, 1);
  for (const auto& col : columns) {
    double mean = 0;
    for (auto v : col) mean += static_cast<double>(v);
    mean /= static_cast<double>(n);
    double var = 0;
    for (auto v : col) {
      double d = static_cast<double>(v) - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    double sigma = std::sqrt(var);
    if (sigma == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      double z = (static_cast<double>(col[i]) - mean) / sigma;
      if (std::abs(z) > z_threshold) keep[i] = 0;
    }
  }
  return keep;
}

} // namespace detail

/// Removes rows whose comment or context is empty or whitespace-only.
/// Order of the survivors is preserved.
inline std::pair<Corpus, std::size_t> drop_incomplete(const Corpus& corpus) {
  Corpus out;
  out.provenance = corpus.provenance;
  std::size_t dropped = 0;
  for (const auto& p : corpus.pairs) {
    if (detail::is_blank(p.comment_text) || detail::is_blank(p.code_context)) {
      ++dropped;
    } else {
      out.pairs.push_back(p);
    }
  }
  return {std::move(out), dropped};
}

/// Replaces everything outside ASCII letters/digits/whitespace with a space
/// (when strip_punct is set), lowercases, collapses whitespace runs and
/// trims. Idempotent. Non-ASCII bytes count as separators under the default
/// config.
inline std::string normalize_text(std::string_view s, const PreprocessConfig& cfg = {}) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    bool alnum = c < 128 && std::isalnum(c);
    bool space = c < 128 && std::isspace(c);
    if (space || (!alnum && cfg.strip_punct)) {
      pending_space = true;
      continue;
    }
    char keep = static_cast<char>(c);
    if (cfg.lowercase && c < 128) keep = static_cast<char>(std::tolower(c));
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(keep);
  }
  return out;
}

/// Per line: drops a maximal leading digit run, one optional '.' or ':'
/// after it, and any following blanks. The rest of the line is untouched.
inline std::string strip_leading_numbers(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                           : eol - pos);
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0) {
      if (i < line.size() && (line[i] == '.' || line[i] == ':')) ++i;
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      line.remove_prefix(i);
    }
    out += line;
    if (eol == std::string_view::npos) break;
    out.push_back('\n');
    pos = eol + 1;
  }
  return out;
}

/// Drops rows whose comment or context length (in code points) has
/// |z-score| above the threshold; z-scores use the population standard
/// deviation over the whole corpus.
inline std::pair<Corpus, std::size_t> remove_length_outliers(const Corpus& corpus,
                                                             const PreprocessConfig& cfg = {}) {
  if (corpus.empty()) raise(Errc::EmptyCorpus, "outlier removal needs a non-empty corpus");
  std::vector<std::vector<std::size_t>> columns(2);
  columns[0].reserve(corpus.size());
  columns[1].reserve(corpus.size());
  for (const auto& p : corpus.pairs) {
    columns[0].push_back(detail::utf8_length(p.comment_text));
    columns[1].push_back(detail::utf8_length(p.code_context));
  }
  auto keep = detail::zscore_keep_mask(columns, cfg.z_threshold);
  Corpus out;
  out.provenance = corpus.provenance;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
    if (keep[i])
      out.pairs.push_back(corpus.pairs[i]);
    else
      ++dropped;
  }
  return {std::move(out), dropped};
}

/// Cleaning pipeline, fixed order: drop incomplete rows, strip leading
/// line numbers from contexts, remove length outliers (measured on the raw
/// field lengths), then normalize both text fields. Rows whose text
/// normalizes away to nothing are dropped in a final completeness sweep so
/// a second pass never sees incomplete rows. May return an empty corpus.
inline std::pair<Corpus, PreprocessReport> clean_corpus(const Corpus& corpus,
                                                        const PreprocessConfig& cfg = {}) {
  PreprocessReport report;
  report.rows_in = corpus.size();

  auto [complete, dropped_incomplete] = drop_incomplete(corpus);
  report.dropped_incomplete = dropped_incomplete;
  if (complete.empty()) return {std::move(complete), report};

  for (auto& p : complete.pairs) p.code_context = strip_leading_numbers(p.code_context);

  auto [kept, dropped_outliers] = remove_length_outliers(complete, cfg);
  report.dropped_outliers = dropped_outliers;

  Corpus out;
  out.provenance = kept.provenance;
  for (auto& p : kept.pairs) {
    p.comment_text = normalize_text(p.comment_text, cfg);
    p.code_context = normalize_text(p.code_context, cfg);
    if (p.comment_text.empty() || p.code_context.empty()) {
      ++report.dropped_incomplete;
    } else {
      out.pairs.push_back(std::move(p));
    }
  }
  report.rows_out = out.size();
  return {std::move(out), report};
}

/// clean_corpus, but an empty survivor set is an error.
inline std::pair<Corpus, PreprocessReport> run_pipeline(const Corpus& corpus,
                                                        const PreprocessConfig& cfg = {}) {
  auto result = clean_corpus(corpus, cfg);
  if (result.first.empty()) raise(Errc::EmptyCorpus, "no rows survive preprocessing");
  return result;
}

} // namespace commentqc
