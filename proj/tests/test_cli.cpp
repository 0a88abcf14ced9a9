#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mlvse/cli/commands.hpp"
#include "mlvse/cli/config.hpp"
#include "mlvse/data/corpus_io.hpp"
#include "mlvse/error.hpp"

namespace fs = std::filesystem;
using namespace mlvse;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mlvse");
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mlvse_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<nlohmann::json> evaluation_lines(const fs::path& history) {
  std::vector<nlohmann::json> out;
  std::ifstream in(history);
  for (std::string line; std::getline(in, line);) {
    auto j = nlohmann::json::parse(line);
    if (j.contains("evaluation")) out.push_back(j);
  }
  return out;
}

const std::vector<std::string> kSmallSynth{"--n-train", "60", "--n-val", "20", "--n-test", "20", "--seed", "7"};

fs::path small_corpus(const std::string& name, const std::string& langs = "en,de") {
  const auto dir = scratch(name);
  std::vector<std::string> args{"synth", "--regime", "translation", "--langs", langs, "--out", dir.string()};
  args.insert(args.end(), kSmallSynth.begin(), kSmallSynth.end());
  REQUIRE(invoke(args).code == 0);
  return dir;
}

}  // namespace

TEST_CASE("synth writes the three corpus files deterministically") {
  const auto a = small_corpus("synth_a", "en,de,fr,cs");
  const auto b = small_corpus("synth_b", "en,de,fr,cs");
  for (const char* f : {"captions.tsv", "features.bin", "index.txt"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(read_file(a / f) == read_file(b / f));
  }
  const auto bad = invoke({"synth", "--regime", "parallel", "--out", (a / "x").string()});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("parallel") != std::string::npos);
  CHECK(invoke({"synth", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(invoke({}).code == cli::kExitUsage);
}

TEST_CASE("train cadence, task counts and eval replay") {
  const auto corpus = small_corpus("train_corpus");
  const auto mono = scratch("train_mono");
  auto r = invoke({"train", "--corpus", corpus.string(), "--out", mono.string(), "--langs", "en", "--embed-dim", "4",
                "--hidden-dim", "8", "--batch-size", "16", "--max-iterations", "12", "--patience", "50"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.rfind("# config: ", 0) == 0);
  // 60 captions at batch 16 -> 4 batches per pass.
  std::vector<int> at;
  for (const auto& e : evaluation_lines(mono / "history.jsonl")) at.push_back(e["iteration"].get<int>());
  CHECK(at == std::vector<int>{0, 4, 8, 12});

  const auto multi = scratch("train_multi");
  r = invoke({"train", "--corpus", corpus.string(), "--out", multi.string(), "--embed-dim", "4", "--hidden-dim", "8",
           "--batch-size", "16", "--max-iterations", "12", "--eval-every", "5", "--c2c", "true", "--p-c2i", "1.0"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  at.clear();
  for (const auto& e : evaluation_lines(multi / "history.jsonl")) at.push_back(e["iteration"].get<int>());
  CHECK(at == std::vector<int>{0, 5, 10});
  CHECK(r.out.find("12 c2i, 0 c2c") != std::string::npos);

  const auto cfg = nlohmann::json::parse(read_file(multi / "config.json"));
  CHECK(cfg["eval_every"] == "5");
  CHECK(cfg["c2c"] == true);

  // Replaying the saved best checkpoint on val reproduces the best recall sum.
  const auto report = scratch("eval_out");
  r = invoke({"eval", "--checkpoint", (multi / "model").string(), "--corpus", corpus.string(), "--split", "val", "--out",
           report.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  double best = -1.0;
  for (const auto& e : evaluation_lines(multi / "history.jsonl"))
    if (e["best"].get<bool>()) best = e["recall_sum"].get<double>();
  std::ostringstream expected;
  expected << "recall sum " << std::fixed << std::setprecision(2) << best;
  CHECK(r.out.find(expected.str()) != std::string::npos);

  r = invoke({"eval", "--checkpoint", (multi / "model").string(), "--corpus", corpus.string(), "--direction", "both",
           "--ks", "1,5,10", "--out", report.string()});
  REQUIRE(r.code == 0);
  std::map<std::string, int> per_lang;
  std::ifstream in(report / "report.jsonl");
  for (std::string line; std::getline(in, line);) ++per_lang[nlohmann::json::parse(line)["language"]];
  CHECK(per_lang == std::map<std::string, int>{{"de", 6}, {"en", 6}});

  r = invoke({"eval", "--checkpoint", (multi / "model").string(), "--corpus", corpus.string(), "--direction", "t2i",
           "--ks", "10", "--langs", "de", "--out", report.string()});
  REQUIRE(r.code == 0);
  const auto one = read_file(report / "report.jsonl");
  CHECK(std::count(one.begin(), one.end(), '\n') == 1);
}

TEST_CASE("eval rejects missing and mismatched checkpoints") {
  const auto corpus = small_corpus("eval_corpus");
  CHECK(invoke({"eval", "--checkpoint", (corpus / "nothing").string(), "--corpus", corpus.string()}).code ==
        cli::kExitUsage);

  const auto run = scratch("eval_run");
  REQUIRE(invoke({"train", "--corpus", corpus.string(), "--out", run.string(), "--embed-dim", "4", "--hidden-dim", "8",
               "--max-iterations", "2", "--batch-size", "8"})
              .code == 0);
  const auto other = scratch("eval_other");
  std::vector<std::string> args{"synth", "--langs", "en,fr", "--out", other.string()};
  args.insert(args.end(), kSmallSynth.begin(), kSmallSynth.end());
  REQUIRE(invoke(args).code == 0);
  const auto r = invoke({"eval", "--checkpoint", (run / "model").string(), "--corpus", other.string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("vocabulary hash") != std::string::npos);
}

TEST_CASE("config files") {
  const auto corpus = small_corpus("cfg_corpus");
  const auto dir = scratch("cfg");
  write(dir / "ok.json", "{\n  \"corpus\": \"" + corpus.string() +
                             "\",\n  \"embed_dim\": 4,\n  \"hidden_dim\": 8,\n  \"max_iterations\": 3,\n"
                             "  \"batch_size\": 8,\n  \"languages\": [\"en\", \"de\"],\n  \"eval_every\": 3\n}\n");
  auto r = invoke({"train", "--config", (dir / "ok.json").string(), "--out", (dir / "run").string(), "--seed", "9"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto cfg = nlohmann::json::parse(read_file(dir / "run" / "config.json"));
  CHECK(cfg["seed"] == 9);
  CHECK(cfg["embed_dim"] == 4);

  write(dir / "bad.json", "{\n  \"embed_dim\": 4,\n  \"hidden_dim\" 8\n}\n");
  r = invoke({"train", "--config", (dir / "bad.json").string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("bad.json:3:") != std::string::npos);

  write(dir / "unknown.json", "{\"embed_dimension\": 4}");
  r = invoke({"train", "--config", (dir / "unknown.json").string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("embed_dimension") != std::string::npos);

  CHECK(invoke({"train", "--config", (dir / "absent.json").string()}).code == cli::kExitUsage);
  CHECK_THROWS_WITH_AS(cli::parse_json_document("[1,\n 2,,]", "x"), doctest::Contains("x:2:"), ConfigError);
}

TEST_CASE("output directory defaults to MLVSE_OUT") {
  const auto dir = scratch("env_out");
  ::setenv("MLVSE_OUT", dir.string().c_str(), 1);
  CHECK(cli::default_output_dir() == dir);
  std::vector<std::string> args{"synth"};
  args.insert(args.end(), kSmallSynth.begin(), kSmallSynth.end());
  CHECK(invoke(args).code == 0);
  CHECK(fs::exists(dir / "captions.tsv"));
  ::unsetenv("MLVSE_OUT");
  CHECK(cli::default_output_dir() == "mlvse_out");
}

TEST_CASE("vocab-stats and pairs") {
  const auto corpus = small_corpus("stats_corpus", "en,de,fr,cs");
  auto r = invoke({"vocab-stats", "--corpus", corpus.string(), "--min-count", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("reduction 0.0000") != std::string::npos);
  CHECK(r.out.find("jaccard") != std::string::npos);

  const auto out = scratch("pairs_out");
  r = invoke({"pairs", "--corpus", corpus.string(), "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("total\t360") != std::string::npos);
  CHECK(r.out.find("cs-de\t60") != std::string::npos);
  CHECK(fs::exists(out / "pairs.tsv"));
  CHECK(invoke({"pairs", "--corpus", corpus.string(), "--langs", "en", "--out", out.string()}).code == cli::kExitUsage);
}

TEST_CASE("experiment recipes") {
  auto r = invoke({"experiment", "--list"});
  CHECK(r.code == 0);
  for (const char* name : {"E1", "E2", "E3", "E4", "E5", "E6"}) CHECK(r.out.find(name) != std::string::npos);
  r = invoke({"experiment", "E9"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("E1") != std::string::npos);

  const std::vector<std::string> tiny{"--seeds",  "1",   "--n-train",        "40", "--n-val",      "20",
                                      "--n-test", "20",  "--max-iterations", "4",  "--embed-dim",  "4",
                                      "--hidden-dim", "8", "--batch-size",   "8",  "--eval-every", "2"};
  const std::map<std::string, std::vector<std::string>> rows{
      {"E1", {"Monolingual", "Bilingual", "+ c2c"}},
      {"E3", {"Full Monolingual", "Half Monolingual", "Bi-overlap", "+ c2c", "Bi-disjoint"}},
      {"E5", {"Monolingual", "Multilingual", "+ Comparable", "+ c2c"}}};
  for (const auto& [name, labels] : rows) {
    const auto out = scratch("exp_" + name);
    std::vector<std::string> args{"experiment", name, "--out", out.string()};
    args.insert(args.end(), tiny.begin(), tiny.end());
    r = invoke(args);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.rfind("# config: {", 0) == 0);
    const auto table = read_file(out / (name + ".txt"));
    std::size_t pos = 0;
    for (const auto& label : labels) {
      const auto at = table.find("\n" + label + " ", pos);
      CHECK_MESSAGE(at != std::string::npos, name << " row " << label);
      if (at != std::string::npos) pos = at + 1;
    }
    CHECK(fs::exists(out / (name + ".jsonl")));
  }
}
