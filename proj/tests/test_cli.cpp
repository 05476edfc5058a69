#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "commentqc/cextract.hpp"
#include "commentqc/corpus.hpp"
#include "commentqc/csv.hpp"
#include "support/fixtures.hpp"

using namespace commentqc;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args, const std::filesystem::path& scratch) {
  auto log = scratch / ("cli_out_" + std::to_string(::rand()) + ".log");
  std::string cmd = std::string(COMMENTQC_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.output = testsupport::read_text(log);
  return r;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return csv::parse_all(in);
}

} // namespace

TEST_CASE("cli extract") {
  testsupport::TempDir dir("cli_extract");
  SECTION("empty directory gives header-only csv, exit 0") {
    std::filesystem::create_directory(dir.path / "src");
    auto out = dir.path / "pairs.csv";
    auto r = run_cli("extract --root " + (dir.path / "src").string() + " --out " + out.string(),
                     dir.path);
    CHECK(r.exit_code == 0);
    CHECK(testsupport::read_text(out) == "id,comment,code_context,label\n");
  }
  SECTION("four-line fixture with window 1 yields two rows") {
    std::filesystem::create_directory(dir.path / "src");
    testsupport::write_text(dir.path / "src" / "f.c", "int a;\n// inc\na++;\n/* done */\n");
    auto out = dir.path / "pairs.csv";
    auto r = run_cli("extract --root " + (dir.path / "src").string() + " --window 1 --out " +
                         out.string(),
                     dir.path);
    CHECK(r.exit_code == 0);
    auto rows = read_csv(out);
    REQUIRE(rows.size() == 3); // header + 2 pairs
    CHECK(rows[1][1] == "inc");
    CHECK(rows[2][1] == "done");
    CHECK(rows[1][3].empty());
  }
  SECTION("missing root exits 1") {
    auto r = run_cli("extract --root /no/such/dir --out " + (dir.path / "x.csv").string(),
                     dir.path);
    CHECK(r.exit_code == 1);
  }
  SECTION("no mode flags is a usage error") {
    auto r = run_cli("extract --out " + (dir.path / "x.csv").string(), dir.path);
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("cli preprocess writes cleaned csv and manifest") {
  testsupport::TempDir dir("cli_preprocess");
  auto corpus = testsupport::separable_corpus(30, 3);
  corpus.pairs[4].comment_text = ""; // one incomplete row
  auto input = dir.path / "seed.csv";
  save_corpus(corpus, input.string());

  auto out_dir = dir.path / "out";
  auto r = run_cli("preprocess --input " + input.string() + " --out-dir " + out_dir.string(),
                   dir.path);
  CHECK(r.exit_code == 0);
  auto cleaned = load_corpus((out_dir / "cleaned.csv").string(), Provenance::Seed);
  CHECK(cleaned.size() == 29);

  auto manifest = nlohmann::json::parse(testsupport::read_text(out_dir / "manifest.json"));
  CHECK(manifest["command"] == "preprocess");
  CHECK(manifest["preprocess"]["rows_in"] == 30);
  CHECK(manifest["preprocess"]["dropped_incomplete"] == 1);
  CHECK(manifest["preprocess"]["rows_out"] == 29);
  CHECK(manifest["inputs"].size() == 1);
}

TEST_CASE("cli evaluate") {
  testsupport::TempDir dir("cli_evaluate");
  auto corpus = testsupport::separable_corpus(120, 21);
  auto input = dir.path / "seed.csv";
  save_corpus(corpus, input.string());
  auto out_dir = dir.path / "out";

  SECTION("writes a metrics table in published column order") {
    auto r = run_cli("evaluate --input " + input.string() + " --out-dir " + out_dir.string() +
                         " --models lr,dt,knn --k 3 --min-df 1 --seed 42",
                     dir.path);
    REQUIRE(r.exit_code == 0);
    auto rows = read_csv(out_dir / "metrics_seed.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"model", "precision", "recall", "f1"});
    CHECK(rows[1][0] == "Logistic Regression");
    CHECK(rows[2][0] == "Decision Tree");
    CHECK(rows[3][0] == "KNN");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][3]) >= 0.95);

    auto md = testsupport::read_text(out_dir / "metrics_seed.md");
    CHECK(md.find("| # | Model | Precision | Recall | F1 Score |") != std::string::npos);
    CHECK(r.output.find("| Logistic Regression |") != std::string::npos);
  }
  SECTION("all seven models clear 0.95 F1 on the separable corpus") {
    auto big = testsupport::separable_corpus(200, 7);
    auto big_csv = dir.path / "seed200.csv";
    save_corpus(big, big_csv.string());
    auto r = run_cli("evaluate --input " + big_csv.string() + " --out-dir " + out_dir.string() +
                         " --k 5 --seed 42",
                     dir.path);
    REQUIRE(r.exit_code == 0);
    auto rows = read_csv(out_dir / "metrics_seed.csv");
    REQUIRE(rows.size() == 8); // header + one row per model kind
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][3]) >= 0.95);
  }
  SECTION("bow scheme runs end to end") {
    auto r = run_cli("evaluate --input " + input.string() + " --out-dir " + out_dir.string() +
                         " --models lr --k 3 --min-df 1 --scheme bow",
                     dir.path);
    REQUIRE(r.exit_code == 0);
    auto manifest = nlohmann::json::parse(testsupport::read_text(out_dir / "manifest.json"));
    CHECK(manifest["config"]["scheme"] == "bow");
  }
  SECTION("unknown model name exits 2 with a usage message") {
    auto r = run_cli("evaluate --input " + input.string() + " --out-dir " + out_dir.string() +
                         " --models lr,quantum",
                     dir.path);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("usage") != std::string::npos);
  }
  SECTION("missing input file exits 1") {
    auto r = run_cli("evaluate --input /no/such.csv --out-dir " + out_dir.string(), dir.path);
    CHECK(r.exit_code == 1);
  }
  SECTION("same seed twice gives byte-identical outputs") {
    auto out_a = dir.path / "a";
    auto out_b = dir.path / "b";
    std::string common = "evaluate --input " + input.string() +
                         " --models lr,nn,rf --k 3 --min-df 1 --seed 42 --out-dir ";
    REQUIRE(run_cli(common + out_a.string(), dir.path).exit_code == 0);
    REQUIRE(run_cli(common + out_b.string(), dir.path).exit_code == 0);
    for (const char* name : {"metrics_seed.csv", "metrics_seed.md", "manifest.json"})
      CHECK(testsupport::read_text(out_a / name) == testsupport::read_text(out_b / name));
  }
  SECTION("tune writes a trial log and best parameters") {
    auto r = run_cli("tune --input " + input.string() + " --out-dir " + out_dir.string() +
                         " --models knn --k 3 --min-df 1 --budget 3 --seed 1",
                     dir.path);
    REQUIRE(r.exit_code == 0);
    auto rows = read_csv(out_dir / "trials.csv");
    REQUIRE(rows.size() == 1 + 3 * 3); // header + budget * folds
    CHECK(rows[0][0] == "kind");
    auto best = nlohmann::json::parse(testsupport::read_text(out_dir / "best_params.json"));
    CHECK(best.contains("knn"));
  }
}

TEST_CASE("cli compare") {
  testsupport::TempDir dir("cli_compare");
  auto corpus = testsupport::separable_corpus(90, 8);
  auto input = dir.path / "seed.csv";
  save_corpus(corpus, input.string());
  auto out_dir = dir.path / "out";

  SECTION("empty auxiliary file gives all-zero deltas") {
    auto aux = dir.path / "aux.csv";
    testsupport::write_text(aux, "id,comment,code_context,label\n");
    auto r = run_cli("compare --input " + input.string() + " --aux " + aux.string() +
                         " --out-dir " + out_dir.string() + " --models lr,dt,knn --k 3 --min-df 1",
                     dir.path);
    REQUIRE(r.exit_code == 0);
    auto rows = read_csv(out_dir / "deltas.csv");
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i][1] == "0.0000");
      CHECK(rows[i][2] == "0.0000");
      CHECK(rows[i][3] == "0.0000");
    }
  }
  SECTION("labeled auxiliary corpus flows through the comparison") {
    auto aux_corpus = testsupport::separable_corpus(24, 77);
    for (auto& p : aux_corpus.pairs) p.id = "x" + p.id; // loader prefixes aux: anyway
    auto aux = dir.path / "aux.csv";
    save_corpus(aux_corpus, aux.string());
    auto r = run_cli("compare --input " + input.string() + " --aux " + aux.string() +
                         " --out-dir " + out_dir.string() +
                         " --models lr,dt,knn,svm,gbt,rf,nn --k 3 --min-df 1",
                     dir.path);
    REQUIRE(r.exit_code == 0);
    auto plot = nlohmann::json::parse(testsupport::read_text(out_dir / "f1_plot.json"));
    REQUIRE(plot["models"].size() == 7);
    for (const auto& entry : plot["models"]) CHECK(entry["f1"].size() == 2);
    auto manifest = nlohmann::json::parse(testsupport::read_text(out_dir / "manifest.json"));
    CHECK(manifest["auxiliary"]["rows"] == 24);
  }
  SECTION("pseudo-label mode generates labels then compares") {
    auto unl = testsupport::separable_corpus(40, 55);
    ExtractionResult fake;
    for (const auto& p : unl.pairs)
      fake.pairs.push_back({p.comment_text, p.code_context, {"m", 1}});
    auto unlabeled = dir.path / "unlabeled.csv";
    std::ofstream out(unlabeled);
    save_extraction(fake, out);
    out.close();

    auto r = run_cli("compare --input " + input.string() + " --unlabeled " + unlabeled.string() +
                         " --pseudo-label --tau 0.6 --out-dir " + out_dir.string() +
                         " --models dt,knn --k 3 --min-df 1",
                     dir.path);
    REQUIRE(r.exit_code == 0);
    auto manifest = nlohmann::json::parse(testsupport::read_text(out_dir / "manifest.json"));
    CHECK(manifest["auxiliary"]["source"] == "pseudo_label");
  }
  SECTION("compare without aux or pseudo-label is a usage error") {
    auto r = run_cli("compare --input " + input.string() + " --out-dir " + out_dir.string(),
                     dir.path);
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("cli report re-renders from comparison.json") {
  testsupport::TempDir dir("cli_report");
  auto corpus = testsupport::separable_corpus(60, 8);
  auto input = dir.path / "seed.csv";
  save_corpus(corpus, input.string());
  auto aux = dir.path / "aux.csv";
  testsupport::write_text(aux, "id,comment,code_context,label\n");
  auto out_dir = dir.path / "out";
  REQUIRE(run_cli("compare --input " + input.string() + " --aux " + aux.string() + " --out-dir " +
                      out_dir.string() + " --models dt,knn --k 3 --min-df 1",
                  dir.path)
              .exit_code == 0);

  auto original_md = testsupport::read_text(out_dir / "metrics_seed.md");
  auto original_deltas = testsupport::read_text(out_dir / "deltas.csv");
  std::filesystem::remove(out_dir / "metrics_seed.md");
  std::filesystem::remove(out_dir / "deltas.csv");

  auto r = run_cli("report --from " + out_dir.string(), dir.path);
  REQUIRE(r.exit_code == 0);
  CHECK(testsupport::read_text(out_dir / "metrics_seed.md") == original_md);
  CHECK(testsupport::read_text(out_dir / "deltas.csv") == original_deltas);

  SECTION("missing comparison.json exits 1") {
    auto empty = dir.path / "nothing";
    std::filesystem::create_directory(empty);
    CHECK(run_cli("report --from " + empty.string(), dir.path).exit_code == 1);
  }
}

TEST_CASE("cli config file supplies defaults, flags override") {
  testsupport::TempDir dir("cli_config");
  auto corpus = testsupport::separable_corpus(60, 8);
  auto input = dir.path / "seed.csv";
  save_corpus(corpus, input.string());
  auto config = dir.path / "run.toml";
  testsupport::write_text(config, "seed=7\nk=3\nmin-df=1\nmodels=\"dt\"\n");

  auto out_a = dir.path / "a";
  auto r = run_cli("evaluate --config " + config.string() + " --input " + input.string() +
                       " --out-dir " + out_a.string(),
                   dir.path);
  REQUIRE(r.exit_code == 0);
  auto manifest = nlohmann::json::parse(testsupport::read_text(out_a / "manifest.json"));
  CHECK(manifest["config"]["seed"] == 7);
  CHECK(manifest["config"]["k"] == 3);
  CHECK(manifest["config"]["models"] == "dt");

  auto out_b = dir.path / "b";
  r = run_cli("evaluate --config " + config.string() + " --seed 99 --input " + input.string() +
                  " --out-dir " + out_b.string(),
              dir.path);
  REQUIRE(r.exit_code == 0);
  manifest = nlohmann::json::parse(testsupport::read_text(out_b / "manifest.json"));
  CHECK(manifest["config"]["seed"] == 99);
}

TEST_CASE("cli help exits 0, bad flag exits 2") {
  testsupport::TempDir dir("cli_help");
  CHECK(run_cli("--help", dir.path).exit_code == 0);
  CHECK(run_cli("evaluate --no-such-flag", dir.path).exit_code == 2);
}
