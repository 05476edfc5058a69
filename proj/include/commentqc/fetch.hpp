#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "commentqc/error.hpp"

namespace commentqc {

/// Hosting-service client settings. Base URLs are injectable so tests can
/// point both endpoints at a local mock server.
struct RepoClientConfig {
  std::string api_base = "https://api.github.com";
  std::string raw_base = "https://raw.githubusercontent.com";
  std::string token;           // falls back to CT_API_TOKEN when empty
  int max_concurrency = 4;
};

inline std::pair<std::string, std::string> parse_repo_spec(const std::string& repo) {
  auto slash = repo.find('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == repo.size() ||
      repo.find('/', slash + 1) != std::string::npos)
    raise(Errc::InvalidArgument, "repo must be 'owner/name', got '" + repo + "'");
  return {repo.substr(0, slash), repo.substr(slash + 1)};
}

namespace detail {

inline std::string resolve_token(const RepoClientConfig& cfg) {
  if (!cfg.token.empty()) return cfg.token;
  const char* env = std::getenv("CT_API_TOKEN");
  return env ? env : "";
}

inline httplib::Headers api_headers(const RepoClientConfig& cfg) {
  httplib::Headers headers{{"User-Agent", "commentqc"}, {"Accept", "application/vnd.github+json"}};
  auto token = resolve_token(cfg);
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
  return headers;
}

inline void check_status(int status, const httplib::Response& res, const std::string& what) {
  if (status == 404) raise(Errc::NotFound, what);
  if (status == 403 || status == 429) {
    std::string retry = res.get_header_value("Retry-After");
    raise(Errc::RateLimited, what + (retry.empty() ? "" : " (retry after " + retry + "s)"));
  }
  if (status != 200) raise(Errc::HttpError, what + " (status " + std::to_string(status) + ")");
}

inline bool wanted_source_path(const std::string& path) {
  if (path.size() < 2) return false;
  bool c_or_h = path.ends_with(".c") || path.ends_with(".h");
  if (!c_or_h) return false;
  // refuse anything that could escape the destination tree
  if (path.front() == '/' || path.find("..") != std::string::npos) return false;
  return true;
}

} // namespace detail

/// Lists the repository tree via the hosting service API, downloads every
/// *.c / *.h blob and writes it under `dest` preserving relative paths.
/// Returns the number of files written. At most max_concurrency downloads
/// run at once.
inline std::size_t fetch_repo_sources(const RepoClientConfig& cfg, const std::string& repo,
                                      const std::string& ref, const std::filesystem::path& dest) {
  namespace fs = std::filesystem;
  auto [owner, name] = parse_repo_spec(repo);

  httplib::Client api(cfg.api_base);
  api.set_follow_location(true);
  std::string tree_path = "/repos/" + owner + "/" + name + "/git/trees/" + ref + "?recursive=1";
  auto res = api.Get(tree_path, detail::api_headers(cfg));
  if (!res) raise(Errc::HttpError, "no response from " + cfg.api_base + tree_path);
  detail::check_status(res->status, *res, repo + "@" + ref);

  nlohmann::json tree;
  try {
    tree = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::HttpError, std::string("malformed tree listing: ") + e.what());
  }
  if (!tree.contains("tree") || !tree["tree"].is_array())
    raise(Errc::HttpError, "tree listing has no 'tree' array");

  std::vector<std::string> paths;
  for (const auto& entry : tree["tree"]) {
    if (entry.value("type", "") != "blob") continue;
    std::string path = entry.value("path", "");
    if (detail::wanted_source_path(path)) paths.push_back(path);
  }

  fs::create_directories(dest);
  if (paths.empty()) return 0;

  std::string raw_prefix = "/" + owner + "/" + name + "/" + ref + "/";
  auto headers = detail::api_headers(cfg);

  std::atomic<std::size_t> next{0};
  std::vector<std::optional<Error>> failures(paths.size());
  auto worker = [&]() {
    httplib::Client raw(cfg.raw_base);
    raw.set_follow_location(true);
    for (std::size_t i = next.fetch_add(1); i < paths.size(); i = next.fetch_add(1)) {
      try {
        auto file_res = raw.Get(raw_prefix + paths[i], headers);
        if (!file_res) raise(Errc::HttpError, "no response for " + paths[i]);
        detail::check_status(file_res->status, *file_res, paths[i]);
        fs::path out_path = dest / paths[i];
        fs::create_directories(out_path.parent_path());
        std::ofstream out(out_path, std::ios::binary);
        if (!out) raise(Errc::IoError, "cannot write " + out_path.string());
        out.write(file_res->body.data(), static_cast<std::streamsize>(file_res->body.size()));
      } catch (const Error& e) {
        failures[i] = e;
      }
    }
  };

  std::size_t n_threads = std::min<std::size_t>(std::max(cfg.max_concurrency, 1), paths.size());
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  for (const auto& failure : failures)
    if (failure) throw *failure;
  return paths.size();
}

} // namespace commentqc
