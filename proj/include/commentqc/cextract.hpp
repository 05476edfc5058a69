#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "commentqc/corpus.hpp"
#include "commentqc/error.hpp"

namespace commentqc {

struct SourceLocation {
  std::string path;
  std::size_t line = 0; // 1-based line of the comment's opening delimiter
};

struct ExtractedPair {
  std::string comment_text; // delimiters stripped, outer whitespace trimmed
  std::string code_context; // up to W lines above + own-line remnant + W lines below
  SourceLocation origin;
};

struct ExtractionIssue {
  enum class Kind { UnterminatedBlockComment, SkippedNonUtf8 };
  Kind kind;
  std::string path;
  std::size_t line = 0;
};

struct ExtractionResult {
  std::vector<ExtractedPair> pairs;
  std::vector<ExtractionIssue> issues;
};

inline bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  auto cont = [&](std::size_t k, unsigned char lo = 0x80, unsigned char hi = 0xBF) {
    if (k >= s.size()) return false;
    unsigned char c = static_cast<unsigned char>(s[k]);
    return c >= lo && c <= hi;
  };
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) { i += 1; continue; }
    if (c >= 0xC2 && c <= 0xDF) {
      if (!cont(i + 1)) return false;
      i += 2;
    } else if (c == 0xE0) {
      if (!cont(i + 1, 0xA0) || !cont(i + 2)) return false;
      i += 3;
    } else if ((c >= 0xE1 && c <= 0xEC) || c == 0xEE || c == 0xEF) {
      if (!cont(i + 1) || !cont(i + 2)) return false;
      i += 3;
    } else if (c == 0xED) {
      if (!cont(i + 1, 0x80, 0x9F) || !cont(i + 2)) return false;
      i += 3;
    } else if (c == 0xF0) {
      if (!cont(i + 1, 0x90) || !cont(i + 2) || !cont(i + 3)) return false;
      i += 4;
    } else if (c >= 0xF1 && c <= 0xF3) {
      if (!cont(i + 1) || !cont(i + 2) || !cont(i + 3)) return false;
      i += 4;
    } else if (c == 0xF4) {
      if (!cont(i + 1, 0x80, 0x8F) || !cont(i + 2) || !cont(i + 3)) return false;
      i += 4;
    } else {
      return false;
    }
  }
  return true;
}

namespace detail {

struct CommentSpan {
  std::size_t begin = 0; // byte offset of opening delimiter
  std::size_t end = 0;   // byte offset one past the closing delimiter / last byte
  std::size_t start_line = 0;
  std::size_t end_line = 0;
  std::string text; // interior, line-spliced, untrimmed
};

struct LexOutput {
  std::vector<CommentSpan> comments;
  std::vector<std::size_t> unterminated_lines; // opening line of any unterminated block comment
};

/// Lexical scan for C comments. Tracks string and character literals (with
/// escapes and backslash-newline splices) so delimiter lookalikes inside
/// them are never taken for comments. A raw newline inside a literal ends
/// it, which keeps the scan in sync on not-quite-C input.
inline LexOutput lex_comments(std::string_view src) {
  LexOutput out;
  std::size_t i = 0, line = 1;
  const std::size_t n = src.size();

  auto splice_len = [&](std::size_t k) -> std::size_t {
    // Length of a backslash-newline splice starting at k, 0 if none.
    if (k >= n || src[k] != '\\') return 0;
    if (k + 1 < n && src[k + 1] == '\n') return 2;
    if (k + 2 < n && src[k + 1] == '\r' && src[k + 2] == '\n') return 3;
    return 0;
  };

  while (i < n) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      ++i;
      while (i < n) {
        if (std::size_t sp = splice_len(i)) {
          i += sp;
          ++line;
          continue;
        }
        if (src[i] == '\\') {
          i += (i + 1 < n) ? 2 : 1;
          continue;
        }
        if (src[i] == quote) {
          ++i;
          break;
        }
        if (src[i] == '\n') break; // unterminated literal: resync at end of line
        ++i;
      }
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      CommentSpan span;
      span.begin = i;
      span.start_line = line;
      i += 2;
      while (i < n) {
        if (std::size_t sp = splice_len(i)) { // continued line comment
          i += sp;
          ++line;
          continue;
        }
        if (src[i] == '\n') break;
        span.text.push_back(src[i]);
        ++i;
      }
      span.end = i;
      span.end_line = line;
      out.comments.push_back(std::move(span));
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      CommentSpan span;
      span.begin = i;
      span.start_line = line;
      i += 2;
      bool closed = false;
      while (i < n) {
        if (src[i] == '*' && i + 1 < n && src[i + 1] == '/') {
          i += 2;
          closed = true;
          break;
        }
        if (src[i] == '\n') ++line;
        span.text.push_back(src[i]);
        ++i;
      }
      if (closed) {
        span.end = i;
        span.end_line = line;
        out.comments.push_back(std::move(span));
      } else {
        out.unterminated_lines.push_back(span.start_line);
      }
      continue;
    }
    ++i;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

struct LineIndex {
  std::vector<std::size_t> starts; // byte offset of each line start
  std::string_view src;

  explicit LineIndex(std::string_view s) : src(s) {
    starts.push_back(0);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] == '\n') starts.push_back(i + 1);
  }

  std::size_t count() const { return starts.size(); }

  // 1-based line text without the trailing newline / CR.
  std::string_view line(std::size_t no) const {
    std::size_t b = starts[no - 1];
    std::size_t e = (no < starts.size()) ? starts[no] : src.size();
    while (e > b && (src[e - 1] == '\n' || src[e - 1] == '\r')) --e;
    return src.substr(b, e - b);
  }

  std::size_t line_begin(std::size_t no) const { return starts[no - 1]; }
  std::size_t line_end_excl(std::size_t no) const {
    std::size_t e = (no < starts.size()) ? starts[no] : src.size();
    while (e > starts[no - 1] && (src[e - 1] == '\n' || src[e - 1] == '\r')) --e;
    return e;
  }
};

} // namespace detail

/// Extracts every comment of a C source text together with surrounding code
/// context: `window` lines above the comment, the comment's own line span
/// with the comment itself cut out (collapsed to one line, dropped if
/// nothing is left), and `window` lines below. Comment-looking sequences
/// inside string/char literals or other comments are not comments.
inline ExtractionResult extract_comments(std::string_view source, std::size_t window,
                                         std::string_view path = "") {
  ExtractionResult result;
  auto lexed = detail::lex_comments(source);
  detail::LineIndex lines(source);

  for (const auto& span : lexed.comments) {
    ExtractedPair pair;
    pair.comment_text = detail::trim(span.text);
    pair.origin.path = std::string(path);
    pair.origin.line = span.start_line;

    std::vector<std::string> ctx;
    std::size_t first_above = span.start_line > window ? span.start_line - window : 1;
    for (std::size_t l = first_above; l < span.start_line; ++l)
      ctx.emplace_back(lines.line(l));

    // Own span remnant: everything on the comment's first/last lines that
    // is not the comment itself, joined into a single line.
    std::string remnant;
    remnant.append(source.substr(lines.line_begin(span.start_line),
                                 span.begin - lines.line_begin(span.start_line)));
    std::size_t tail_end = lines.line_end_excl(span.end_line);
    if (span.end < tail_end) remnant.append(source.substr(span.end, tail_end - span.end));
    while (!remnant.empty() && (remnant.back() == '\r' || remnant.back() == '\n')) remnant.pop_back();
    if (!detail::blank(remnant)) ctx.push_back(remnant);

    for (std::size_t l = span.end_line + 1;
         l <= std::min(span.end_line + window, lines.count()); ++l) {
      auto text = lines.line(l);
      if (l == lines.count() && text.empty()) break; // phantom line after trailing newline
      ctx.emplace_back(text);
    }

    std::string joined;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      if (i) joined.push_back('\n');
      joined += ctx[i];
    }
    pair.code_context = std::move(joined);
    result.pairs.push_back(std::move(pair));
  }

  for (auto l : lexed.unterminated_lines)
    result.issues.push_back({ExtractionIssue::Kind::UnterminatedBlockComment, std::string(path), l});
  return result;
}

/// Recursive scan of *.c / *.h files under `root`, lexicographic path
/// order. Files that are not valid UTF-8 are skipped with an issue record.
inline ExtractionResult extract_directory(const std::filesystem::path& root, std::size_t window) {
  namespace fs = std::filesystem;
  if (!fs::exists(root) || !fs::is_directory(root))
    raise(Errc::IoError, "not a directory: " + root.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    if (ext == ".c" || ext == ".h") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

  ExtractionResult result;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string source = buf.str();
    if (!is_valid_utf8(source)) {
      result.issues.push_back({ExtractionIssue::Kind::SkippedNonUtf8, file.generic_string(), 0});
      continue;
    }
    auto one = extract_comments(source, window, file.generic_string());
    for (auto& p : one.pairs) result.pairs.push_back(std::move(p));
    for (auto& w : one.issues) result.issues.push_back(std::move(w));
  }
  return result;
}

/// Extraction CSV: corpus schema with the label column left blank.
inline void save_extraction(const ExtractionResult& result, std::ostream& out) {
  out << kCorpusHeader << "\n";
  std::size_t i = 0;
  for (const auto& p : result.pairs) {
    std::string base = p.origin.path.empty() ? "pair" : p.origin.path;
    std::string id = base + ":" + std::to_string(p.origin.line) + ":" + std::to_string(i);
    out << csv::join_row({id, p.comment_text, p.code_context, ""});
    ++i;
  }
}

} // namespace commentqc
