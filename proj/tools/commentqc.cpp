// commentqc CLI: extraction, preprocessing, evaluation and the
// seed-vs-augmented comparison experiment, wired for reproducible runs.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commentqc/augment.hpp"
#include "commentqc/cextract.hpp"
#include "commentqc/corpus.hpp"
#include "commentqc/digest.hpp"
#include "commentqc/error.hpp"
#include "commentqc/evaluate.hpp"
#include "commentqc/fetch.hpp"
#include "commentqc/models.hpp"
#include "commentqc/preprocess.hpp"
#include "commentqc/report.hpp"
#include "commentqc/vectorize.hpp"
#include "commentqc/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOpts {
  std::uint64_t seed = 42;
  std::string scheme = "tfidf";
  int k = 5;
  std::string models = "all";
  int budget = 20;
  double tau = 0.9;
  int jobs = 1;
  double z_threshold = 3.0;
  std::size_t min_df = 2;
  bool keep_case = false;
  bool keep_punct = false;
};

std::vector<commentqc::ModelKind> parse_kinds(const std::string& list) {
  using commentqc::ModelKind;
  if (list == "all" || list.empty())
    return {commentqc::kAllModelKinds.begin(), commentqc::kAllModelKinds.end()};
  std::vector<ModelKind> kinds;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto kind = commentqc::parse_model_id(item);
    if (!kind)
      throw UsageError("unknown model '" + item + "' (expected lr,dt,knn,svm,gbt,rf,nn or all)");
    kinds.push_back(*kind);
  }
  if (kinds.empty()) throw UsageError("--models resolved to an empty list");
  return kinds;
}

commentqc::PreprocessConfig preprocess_config(const CommonOpts& opts) {
  commentqc::PreprocessConfig cfg;
  cfg.z_threshold = opts.z_threshold;
  cfg.lowercase = !opts.keep_case;
  cfg.strip_punct = !opts.keep_punct;
  return cfg;
}

commentqc::FeatureConfig feature_config(const CommonOpts& opts) {
  commentqc::FeatureConfig cfg;
  auto scheme = commentqc::parse_scheme(opts.scheme);
  if (!scheme) throw UsageError("unknown scheme '" + opts.scheme + "' (expected bow or tfidf)");
  cfg.scheme = *scheme;
  cfg.min_df = opts.min_df;
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) commentqc::raise(commentqc::Errc::IoError, "cannot write " + path.string());
  out << content;
}

ordered_json config_json(const CommonOpts& opts) {
  ordered_json j;
  j["seed"] = opts.seed;
  j["scheme"] = opts.scheme;
  j["k"] = opts.k;
  j["models"] = opts.models;
  j["budget"] = opts.budget;
  j["tau"] = opts.tau;
  j["jobs"] = opts.jobs;
  j["z_threshold"] = opts.z_threshold;
  j["min_df"] = opts.min_df;
  j["lowercase"] = !opts.keep_case;
  j["strip_punct"] = !opts.keep_punct;
  return j;
}

struct ManifestBuilder {
  ordered_json j;

  ManifestBuilder(const std::string& command, const CommonOpts& opts) {
    j["tool"] = "commentqc";
    j["version"] = commentqc::kVersion;
    j["model_format_version"] = commentqc::kModelFormatVersion;
    j["command"] = command;
    j["config"] = config_json(opts);
    j["inputs"] = ordered_json::object();
    j["outputs"] = ordered_json::array();
  }

  void add_input(const std::string& path) {
    j["inputs"][path] = "sha256:" + commentqc::sha256_file_hex(path);
  }
  void add_output(const std::string& name) { j["outputs"].push_back(name); }
  void add_section(const std::string& key, ordered_json value) { j[key] = std::move(value); }

  void write(const fs::path& out_dir) {
    write_file(out_dir / "manifest.json", j.dump(2) + "\n");
  }
};

ordered_json report_json(const commentqc::PreprocessReport& r) {
  ordered_json j;
  j["rows_in"] = r.rows_in;
  j["dropped_incomplete"] = r.dropped_incomplete;
  j["dropped_outliers"] = r.dropped_outliers;
  j["rows_out"] = r.rows_out;
  return j;
}

// ---------------------------------------------------------------------------

struct ExtractArgs {
  std::string root;
  std::string repo;
  std::string ref = "main";
  std::string api_base;
  std::string raw_base;
  std::string cache = "commentqc_fetch";
  std::size_t window = 3;
  std::string out = "extracted.csv";
};

int cmd_extract(const ExtractArgs& args) {
  if (args.root.empty() && args.repo.empty())
    throw UsageError("extract needs --root DIR or --repo owner/name");

  fs::path root = args.root;
  if (!args.repo.empty()) {
    commentqc::RepoClientConfig cfg;
    if (!args.api_base.empty()) cfg.api_base = args.api_base;
    if (!args.raw_base.empty()) cfg.raw_base = args.raw_base;
    auto count = commentqc::fetch_repo_sources(cfg, args.repo, args.ref, args.cache);
    std::cout << "fetched " << count << " source files from " << args.repo << "@" << args.ref
              << " into " << args.cache << "\n";
    root = args.cache;
  }

  auto result = commentqc::extract_directory(root, args.window);
  std::ofstream out(args.out, std::ios::binary);
  if (!out) commentqc::raise(commentqc::Errc::IoError, "cannot write " + args.out);
  commentqc::save_extraction(result, out);

  for (const auto& issue : result.issues) {
    if (issue.kind == commentqc::ExtractionIssue::Kind::SkippedNonUtf8)
      std::cerr << "warning: skipped non-UTF-8 file " << issue.path << "\n";
    else
      std::cerr << "warning: unterminated block comment at " << issue.path << ":" << issue.line
                << "\n";
  }
  std::cout << result.pairs.size() << " pairs -> " << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct PreprocessArgs {
  std::string input;
  std::string out_dir = "out";
};

int cmd_preprocess(const PreprocessArgs& args, const CommonOpts& opts) {
  auto corpus = commentqc::load_corpus(args.input, commentqc::Provenance::Seed);
  auto [clean, report] = commentqc::run_pipeline(corpus, preprocess_config(opts));

  fs::create_directories(args.out_dir);
  fs::path out_csv = fs::path(args.out_dir) / "cleaned.csv";
  commentqc::save_corpus(clean, out_csv.string());

  ManifestBuilder manifest("preprocess", opts);
  manifest.add_input(args.input);
  manifest.add_output("cleaned.csv");
  manifest.add_section("preprocess", report_json(report));
  manifest.write(args.out_dir);

  std::cout << "rows_in=" << report.rows_in << " dropped_incomplete=" << report.dropped_incomplete
            << " dropped_outliers=" << report.dropped_outliers << " rows_out=" << report.rows_out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string input;
  std::string out_dir = "out";
  bool tune = false;
};

int cmd_evaluate(const EvaluateArgs& args, const CommonOpts& opts, const char* command) {
  auto kinds = parse_kinds(opts.models);
  auto features = feature_config(opts);

  auto corpus = commentqc::load_corpus(args.input, commentqc::Provenance::Seed);
  auto [clean, prep_report] = commentqc::run_pipeline(corpus, preprocess_config(opts));
  auto plan = commentqc::stratified_kfold(clean, opts.k, commentqc::derive_seed(opts.seed, "folds"));

  std::vector<commentqc::NamedMetrics> rows;
  std::string trials_csv;
  ordered_json best_params = ordered_json::object();
  for (auto kind : kinds) {
    if (args.tune) {
      auto sr = commentqc::random_search(commentqc::default_param_space(kind), opts.budget, clean,
                                         plan, features, opts.seed, nullptr, opts.jobs);
      rows.push_back({commentqc::model_display_name(kind), sr.best_cv.mean});
      std::ostringstream trial_out;
      commentqc::export_trials(kind, sr.trials, trial_out);
      std::string block = trial_out.str();
      if (!trials_csv.empty()) block = block.substr(block.find('\n') + 1); // keep one header
      trials_csv += block;
      best_params[commentqc::model_id(kind)] = commentqc::hyperparams_json(sr.best_spec);
    } else {
      auto cv = commentqc::cross_validate(commentqc::default_spec(kind), clean, plan, features,
                                          commentqc::derive_seed(opts.seed, "cv"), nullptr,
                                          opts.jobs);
      rows.push_back({commentqc::model_display_name(kind), cv.mean});
    }
  }

  fs::create_directories(args.out_dir);
  std::string md = commentqc::render_metrics_markdown(rows, "Results with seed data");
  write_file(fs::path(args.out_dir) / "metrics_seed.md", md);
  write_file(fs::path(args.out_dir) / "metrics_seed.csv", commentqc::render_metrics_csv(rows));

  ManifestBuilder manifest(command, opts);
  manifest.add_input(args.input);
  manifest.add_output("metrics_seed.md");
  manifest.add_output("metrics_seed.csv");
  if (args.tune) {
    write_file(fs::path(args.out_dir) / "trials.csv", trials_csv);
    write_file(fs::path(args.out_dir) / "best_params.json", best_params.dump(2) + "\n");
    manifest.add_output("trials.csv");
    manifest.add_output("best_params.json");
  }
  manifest.add_section("preprocess", report_json(prep_report));
  manifest.write(args.out_dir);

  std::cout << md;
  return 0;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
  std::string input;
  std::string aux;
  std::string unlabeled;
  bool pseudo_label = false;
  std::string out_dir = "out";
};

int cmd_compare(const CompareArgs& args, const CommonOpts& opts) {
  auto kinds = parse_kinds(opts.models);
  auto features = feature_config(opts);
  auto prep = preprocess_config(opts);

  auto corpus = commentqc::load_corpus(args.input, commentqc::Provenance::Seed);
  auto [clean, prep_report] = commentqc::run_pipeline(corpus, prep);

  commentqc::Corpus aux;
  aux.provenance = commentqc::Provenance::Auxiliary;
  if (!args.aux.empty()) {
    auto aux_raw = commentqc::load_corpus(args.aux, commentqc::Provenance::Auxiliary);
    if (!aux_raw.empty()) aux = commentqc::clean_corpus(aux_raw, prep).first;
  } else if (args.pseudo_label) {
    if (args.unlabeled.empty())
      throw UsageError("--pseudo-label needs --unlabeled FILE with extraction output");
    auto rows = commentqc::load_unlabeled(args.unlabeled);
    std::vector<commentqc::ExtractedPair> pairs;
    pairs.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      pairs.push_back({rows[i].comment_text, rows[i].code_context, {args.unlabeled, i + 1}});
    commentqc::LabelerPolicy policy;
    policy.confidence_threshold = opts.tau;
    auto labeler = commentqc::train_labeler(clean, policy, features, opts.seed);
    aux = commentqc::pseudo_label(labeler.model, pairs, labeler.vocab, features.scheme, opts.tau,
                                  prep);
  } else {
    throw UsageError("compare needs --aux FILE or --pseudo-label with --unlabeled FILE");
  }

  std::cout << "auxiliary rows joining training folds: " << aux.size() << "\n";
  if (aux.empty())
    std::cerr << "warning: auxiliary corpus is empty, both arms will be identical"
              << (args.pseudo_label ? " (consider lowering --tau)" : "") << "\n";

  auto report = commentqc::run_comparison(clean, aux, kinds, opts.k, features, opts.seed, opts.jobs);

  fs::create_directories(args.out_dir);
  fs::path out_dir = args.out_dir;
  write_file(out_dir / "metrics_seed.md",
             commentqc::render_metrics_markdown(commentqc::seed_rows(report), "Results with seed data"));
  write_file(out_dir / "metrics_seed.csv", commentqc::render_metrics_csv(commentqc::seed_rows(report)));
  write_file(out_dir / "metrics_augmented.md",
             commentqc::render_metrics_markdown(commentqc::augmented_rows(report),
                                                "Results with seed + auxiliary data"));
  write_file(out_dir / "metrics_augmented.csv",
             commentqc::render_metrics_csv(commentqc::augmented_rows(report)));
  write_file(out_dir / "deltas.csv", commentqc::render_deltas_csv(report));
  write_file(out_dir / "f1_plot.json", commentqc::f1_plot_json(report).dump(2) + "\n");
  write_file(out_dir / "comparison.json", commentqc::comparison_to_json(report).dump(2) + "\n");

  ManifestBuilder manifest("compare", opts);
  manifest.add_input(args.input);
  if (!args.aux.empty()) manifest.add_input(args.aux);
  if (!args.unlabeled.empty()) manifest.add_input(args.unlabeled);
  for (const char* name : {"metrics_seed.md", "metrics_seed.csv", "metrics_augmented.md",
                           "metrics_augmented.csv", "deltas.csv", "f1_plot.json", "comparison.json"})
    manifest.add_output(name);
  manifest.add_section("preprocess", report_json(prep_report));
  ordered_json aux_info;
  aux_info["rows"] = aux.size();
  aux_info["source"] = !args.aux.empty() ? "labeled_csv" : "pseudo_label";
  manifest.add_section("auxiliary", aux_info);
  manifest.write(out_dir);

  std::cout << commentqc::render_comparison_markdown(report);
  return 0;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  std::string from = "out";
};

int cmd_report(const ReportArgs& args) {
  fs::path dir = args.from;
  std::ifstream in(dir / "comparison.json");
  if (!in)
    commentqc::raise(commentqc::Errc::IoError, (dir / "comparison.json").string() + " not found");
  nlohmann::json j = nlohmann::json::parse(in);
  auto report = commentqc::comparison_from_json(j);

  write_file(dir / "metrics_seed.md",
             commentqc::render_metrics_markdown(commentqc::seed_rows(report), "Results with seed data"));
  write_file(dir / "metrics_seed.csv", commentqc::render_metrics_csv(commentqc::seed_rows(report)));
  write_file(dir / "metrics_augmented.md",
             commentqc::render_metrics_markdown(commentqc::augmented_rows(report),
                                                "Results with seed + auxiliary data"));
  write_file(dir / "metrics_augmented.csv",
             commentqc::render_metrics_csv(commentqc::augmented_rows(report)));
  write_file(dir / "deltas.csv", commentqc::render_deltas_csv(report));
  write_file(dir / "f1_plot.json", commentqc::f1_plot_json(report).dump(2) + "\n");

  std::cout << commentqc::render_comparison_markdown(report);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"commentqc: classify code comments as Useful / Not Useful"};
  app.require_subcommand(1);
  app.fallthrough(true);
  app.set_config("--config", "", "TOML config file (keys are long option names)");

  CommonOpts opts;
  app.add_option("--seed", opts.seed, "global RNG seed")->capture_default_str();
  app.add_option("--scheme", opts.scheme, "feature scheme: bow or tfidf")
      ->check(CLI::IsMember({"bow", "tfidf"}))
      ->capture_default_str();
  app.add_option("--k", opts.k, "cross-validation fold count")->capture_default_str();
  app.add_option("--models", opts.models, "comma list of lr,dt,knn,svm,gbt,rf,nn or 'all'")
      ->capture_default_str();
  app.add_option("--budget", opts.budget, "random search candidates per model")
      ->capture_default_str();
  app.add_option("--tau", opts.tau, "pseudo-label confidence threshold")->capture_default_str();
  app.add_option("--jobs", opts.jobs, "worker thread cap")->capture_default_str();
  app.add_option("--z-threshold", opts.z_threshold, "length outlier z-score threshold")
      ->capture_default_str();
  app.add_option("--min-df", opts.min_df, "minimum document frequency for vocabulary terms")
      ->capture_default_str();
  app.add_flag("--keep-case", opts.keep_case, "skip lowercasing");
  app.add_flag("--keep-punct", opts.keep_punct, "skip punctuation stripping");

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract", "extract comments from C sources");
  extract->add_option("--root", extract_args.root, "directory of .c/.h files");
  extract->add_option("--repo", extract_args.repo, "owner/name on the code hosting service");
  extract->add_option("--ref", extract_args.ref, "branch or tag")->capture_default_str();
  extract->add_option("--api-base", extract_args.api_base, "override API base URL");
  extract->add_option("--raw-base", extract_args.raw_base, "override raw download base URL");
  extract->add_option("--cache", extract_args.cache, "directory for fetched sources")
      ->capture_default_str();
  extract->add_option("--window", extract_args.window, "context lines each side")
      ->capture_default_str();
  extract->add_option("--out", extract_args.out, "output CSV")->capture_default_str();

  PreprocessArgs preprocess_args;
  auto* preprocess = app.add_subcommand("preprocess", "clean a labeled corpus CSV");
  preprocess->add_option("--input", preprocess_args.input, "labeled corpus CSV")->required();
  preprocess->add_option("--out-dir", preprocess_args.out_dir, "output directory")
      ->capture_default_str();

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "cross-validated metrics per model");
  evaluate->add_option("--input", evaluate_args.input, "labeled corpus CSV")->required();
  evaluate->add_option("--out-dir", evaluate_args.out_dir, "output directory")
      ->capture_default_str();
  evaluate->add_flag("--tune", evaluate_args.tune, "random-search hyperparameters first");

  EvaluateArgs tune_args;
  tune_args.tune = true;
  auto* tune = app.add_subcommand("tune", "random hyperparameter search with trial log");
  tune->add_option("--input", tune_args.input, "labeled corpus CSV")->required();
  tune->add_option("--out-dir", tune_args.out_dir, "output directory")->capture_default_str();

  CompareArgs compare_args;
  auto* compare = app.add_subcommand("compare", "seed vs seed+auxiliary comparison");
  compare->add_option("--input", compare_args.input, "labeled seed corpus CSV")->required();
  compare->add_option("--aux", compare_args.aux, "pre-labeled auxiliary CSV");
  compare->add_option("--unlabeled", compare_args.unlabeled, "extraction CSV to pseudo-label");
  compare->add_flag("--pseudo-label", compare_args.pseudo_label,
                    "label --unlabeled rows with a seed-trained model");
  compare->add_option("--out-dir", compare_args.out_dir, "output directory")
      ->capture_default_str();

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "re-render report files from comparison.json");
  report->add_option("--from", report_args.from, "directory holding comparison.json")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*extract) return cmd_extract(extract_args);
    if (*preprocess) return cmd_preprocess(preprocess_args, opts);
    if (*evaluate) return cmd_evaluate(evaluate_args, opts, "evaluate");
    if (*tune) return cmd_evaluate(tune_args, opts, "tune");
    if (*compare) return cmd_compare(compare_args, opts);
    if (*report) return cmd_report(report_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 2;
  } catch (const commentqc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
