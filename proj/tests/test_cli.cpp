#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "json.hpp"

#include "aigdetect/cli.hpp"
#include "aigdetect/common.hpp"
#include "aigdetect/corpus.hpp"
#include "aigdetect/run_config.hpp"
#include "aigdetect/scorer.hpp"
#include "oracle.hpp"

using namespace aigdetect;
namespace fs = std::filesystem;

namespace {

template <class Fn>
void expect_error(Errc code, Fn&& fn) {
  try {
    fn();
    FAIL_CHECK("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("run config defaults reproduce the training recipe") {
  const RunConfig c = parse_run_config_text("", "defaults");
  CHECK(c.train.learning_rate == 0.02);
  CHECK(c.train.inner_lr == 0.02);
  CHECK(c.train.batch_size == 32);
  CHECK(c.train.sampling_rate == 0.5);
  CHECK(c.train.epochs == 1);
  CHECK(c.train.margin == 1.0);
  CHECK(c.features.dim == 1028);
  CHECK(c.stats.metric == "entropy");
  CHECK(c.gen.quota.train_human == 9000);
  CHECK(c.gen.quota.train_per_llm == 1000);
  CHECK(c.gen.quota.test_human == 1000);
  CHECK(c.gen.quota.test_per_llm == 125);
  CHECK(c.gen.provider == "mock");
}

TEST_CASE("run config parses every section") {
  const char* text = R"(
# full experiment
[corpus]
train = "train.jsonl"
validation = "val.jsonl"
test = "test.jsonl"

[features]
dim = 260
vocab = "vocab.tsv"

[train]
learning_rate = 0.01
inner_lr = 0.005
batch_size = 16
sampling_rate = 0.25
epochs = 2
margin = 0.5
seed = 77

[eval]
families = "families.json"

[stats]
metric = "oov_ratio"
bandwidth = 0.125

[gen]
models = ["m1", "m2"]
train_human = 100
train_per_llm = 10
test_human = 20
test_per_llm = 5
seed = 3
provider = "mock"
concurrency = 4
shared_sources = false
)";
  const RunConfig c = parse_run_config_text(text, "full");
  CHECK(c.corpus.train == "train.jsonl");
  CHECK(c.corpus.validation == "val.jsonl");
  CHECK(c.corpus.test == "test.jsonl");
  CHECK(c.features.dim == 260);
  CHECK(c.features.vocab == "vocab.tsv");
  CHECK(c.train.learning_rate == 0.01);
  CHECK(c.train.inner_lr == 0.005);
  CHECK(c.train.batch_size == 16);
  CHECK(c.train.sampling_rate == 0.25);
  CHECK(c.train.epochs == 2);
  CHECK(c.train.margin == 0.5);
  CHECK(c.train.seed == 77);
  CHECK(c.eval.families == "families.json");
  CHECK(c.stats.metric == "oov_ratio");
  CHECK(c.stats.bandwidth == 0.125);
  CHECK(c.gen.models == std::vector<std::string>{"m1", "m2"});
  CHECK(c.gen.quota.train_human == 100);
  CHECK(c.gen.quota.test_per_llm == 5);
  CHECK(c.gen.seed == 3);
  CHECK(c.gen.concurrency == 4);
  CHECK(c.gen.shared_sources == false);
}

TEST_CASE("run config rejects unknown keys and sections with line numbers") {
  try {
    parse_run_config_text("[train]\nlearning_rte = 0.02\n", "typo.conf");
    FAIL_CHECK("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config_error);
    const std::string what = e.what();
    CHECK(what.find("train.learning_rte") != std::string::npos);
    CHECK(what.find("typo.conf:2") != std::string::npos);
  }
  expect_error(Errc::config_error, [] {
    parse_run_config_text("[nonsense]\nx = 1\n", "s");
  });
  expect_error(Errc::config_error, [] {
    parse_run_config_text("orphan = 1\n", "s");
  });
  expect_error(Errc::config_error, [] {
    parse_run_config_text("[train]\nseed = \"not a number\"\n", "s");
  });
  expect_error(Errc::config_error, [] {
    parse_run_config_text("[train]\nbatch_size\n", "s");
  });
}

TEST_CASE("dispatch exit codes") {
  CHECK(dispatch({"no-such-subcommand"}) == 2);
  CHECK(dispatch({}) == 2);
  CHECK(dispatch({"train"}) == 2);  // missing required --out
  CHECK(dispatch({"--help"}) == 0);
  // module error: nonexistent corpus
  const auto dir = testsupport::scratch_dir("cli");
  CHECK(dispatch({"ingest", "--corpus", (dir / "missing.jsonl").string(),
                  "--out", (dir / "out").string()}) == 1);
  fs::remove_all(dir);
}

TEST_CASE("synth-train-eval pipeline through the CLI") {
  const auto dir = testsupport::scratch_dir("cli_pipeline");
  const auto s1 = (dir / "s1").string();
  REQUIRE(dispatch({"synth", "--out", s1, "--n-human", "120", "--n-aig",
                    "120", "--test-human", "60", "--test-aig", "60",
                    "--separability", "0.9", "--seed", "5"}) == 0);
  REQUIRE(fs::exists(dir / "s1" / "corpus.jsonl"));
  REQUIRE(fs::exists(dir / "s1" / "vocab.tsv"));
  REQUIRE(fs::exists(dir / "s1" / "manifest.json"));

  const auto t1 = (dir / "t1").string();
  REQUIRE(dispatch({"train", "--corpus", s1 + "/corpus.jsonl", "--vocab",
                    s1 + "/vocab.tsv", "--out", t1, "--seed", "42"}) == 0);
  REQUIRE(fs::exists(dir / "t1" / "model.ckpt"));
  REQUIRE(fs::exists(dir / "t1" / "loss_history.csv"));

  // loss history has a header plus ceil(240/32) = 8 rows
  const std::string loss = read_file(dir / "t1" / "loss_history.csv");
  CHECK(std::count(loss.begin(), loss.end(), '\n') == 9);

  const auto e1 = (dir / "e1").string();
  REQUIRE(dispatch({"eval", "--ckpt", t1 + "/model.ckpt", "--corpus",
                    s1 + "/corpus.jsonl", "--vocab", s1 + "/vocab.tsv",
                    "--out", e1, "--train-model", "synth-llm-1"}) == 0);
  REQUIRE(fs::exists(dir / "e1" / "results.csv"));
  REQUIRE(fs::exists(dir / "e1" / "summary.json"));
  REQUIRE(fs::exists(dir / "e1" / "evals.csv"));
  const std::string results = read_file(dir / "e1" / "results.csv");
  CHECK(results.rfind("model,family,auc,n_pos,n_neg\n", 0) == 0);
  CHECK(results.find("synth-llm-1,synthfam,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("repeated runs produce byte-identical primary outputs") {
  const auto dir = testsupport::scratch_dir("cli_determinism");
  const auto s1 = (dir / "s").string();
  REQUIRE(dispatch({"synth", "--out", s1, "--n-human", "80", "--n-aig", "80",
                    "--seed", "3"}) == 0);
  for (const char* out : {"r1", "r2"}) {
    REQUIRE(dispatch({"train", "--corpus", s1 + "/corpus.jsonl", "--vocab",
                      s1 + "/vocab.tsv", "--out", (dir / out).string(),
                      "--seed", "11"}) == 0);
  }
  CHECK(read_file(dir / "r1" / "model.ckpt") ==
        read_file(dir / "r2" / "model.ckpt"));
  CHECK(read_file(dir / "r1" / "loss_history.csv") ==
        read_file(dir / "r2" / "loss_history.csv"));

  // manifests agree except for the timestamp
  nlohmann::json m1 =
      nlohmann::json::parse(read_file(dir / "r1" / "manifest.json"));
  nlohmann::json m2 =
      nlohmann::json::parse(read_file(dir / "r2" / "manifest.json"));
  m1.erase("created_at");
  m2.erase("created_at");
  CHECK(m1 == m2);
  fs::remove_all(dir);
}

TEST_CASE("manifest references every output with its content hash") {
  const auto dir = testsupport::scratch_dir("cli_manifest");
  const auto out = (dir / "s").string();
  REQUIRE(dispatch({"synth", "--out", out, "--n-human", "20", "--n-aig",
                    "20", "--seed", "1"}) == 0);
  const nlohmann::json manifest =
      nlohmann::json::parse(read_file(dir / "s" / "manifest.json"));
  REQUIRE(manifest.contains("outputs"));
  std::set<std::string> listed;
  for (const auto& entry : manifest["outputs"]) {
    const std::string name = entry["path"].get<std::string>();
    listed.insert(name);
    const std::string expected_hash =
        sha256_hex(read_file(dir / "s" / name));
    CHECK(entry["sha256"].get<std::string>() == expected_hash);
  }
  CHECK(listed == std::set<std::string>{"corpus.jsonl", "vocab.tsv"});
  fs::remove_all(dir);
}

TEST_CASE("matrix subcommand reproduces the uniform-grid mean") {
  const auto dir = testsupport::scratch_dir("cli_matrix");
  std::string evals = "train_model,test_model,auc,n_pos,n_neg\n";
  for (const char* t : {"m1", "m2", "m3"}) {
    for (const char* s : {"m1", "m2", "m3"}) {
      evals += std::string(t) + "," + s + ",0.900000000,10,10\n";
    }
  }
  write_file(dir / "evals.csv", evals);
  write_file(dir / "families.json",
             R"({"m1": "Fam", "m2": "Fam", "m3": "Fam"})");
  REQUIRE(dispatch({"matrix", "--evals", (dir / "evals.csv").string(),
                    "--families", (dir / "families.json").string(), "--out",
                    (dir / "m").string()}) == 0);
  CHECK(read_file(dir / "m" / "matrix.csv") ==
        "train_family,Fam\nFam,0.900\n");
  const nlohmann::json counts =
      nlohmann::json::parse(read_file(dir / "m" / "matrix_counts.json"));
  CHECK(counts["pair_counts"]["Fam"]["Fam"] == 9);
  fs::remove_all(dir);
}

TEST_CASE("eval emits one row per model subset") {
  const auto dir = testsupport::scratch_dir("cli_subsets");
  // test corpus with 27 models, 2 records each, plus 10 humans
  std::vector<TextRecord> records;
  for (int h = 0; h < 10; ++h) {
    TextRecord r;
    r.id = "h" + std::to_string(h);
    r.text = "human words " + std::to_string(h);
    r.label = Label::human;
    r.domain = "d";
    r.split = Split::test;
    records.push_back(std::move(r));
  }
  for (int m = 0; m < 27; ++m) {
    for (int k = 0; k < 2; ++k) {
      TextRecord r;
      r.id = "a" + std::to_string(m) + "_" + std::to_string(k);
      r.text = "generated blob " + std::to_string(m * 31 + k);
      r.label = Label::aig;
      r.generator_model = "model-" + std::to_string(m);
      r.generator_family = "family-" + std::to_string(m / 4);
      r.domain = "d";
      r.split = Split::test;
      records.push_back(std::move(r));
    }
  }
  save_jsonl(records, dir / "test.jsonl");
  write_file(dir / "vocab.tsv", "human\t0.01\nwords\t0.02\n");
  save_scorer(init_scorer(64, 4, 9), dir / "model.ckpt");

  REQUIRE(dispatch({"eval", "--ckpt", (dir / "model.ckpt").string(),
                    "--corpus", (dir / "test.jsonl").string(), "--vocab",
                    (dir / "vocab.tsv").string(), "--out",
                    (dir / "e").string()}) == 0);
  const std::string results = read_file(dir / "e" / "results.csv");
  CHECK(std::count(results.begin(), results.end(), '\n') == 28);  // header+27
  const nlohmann::json summary =
      nlohmann::json::parse(read_file(dir / "e" / "summary.json"));
  CHECK(summary["n_subsets"] == 27);
  CHECK(summary.contains("mean_auc"));
  CHECK(summary.contains("sd_auc"));
  fs::remove_all(dir);
}

TEST_CASE("gen-prompts and gen-run pipeline") {
  const auto dir = testsupport::scratch_dir("cli_gen");
  std::vector<TextRecord> essays;
  for (int e = 0; e < 30; ++e) {
    TextRecord r;
    r.id = "essay" + std::to_string(e);
    r.text = "essay body number " + std::to_string(e);
    r.label = Label::human;
    r.domain = "rip";
    r.split = Split::train;
    essays.push_back(std::move(r));
  }
  save_jsonl(essays, dir / "essays.jsonl");

  REQUIRE(dispatch({"gen-prompts", "--corpus",
                    (dir / "essays.jsonl").string(), "--out",
                    (dir / "p").string()}) == 0);
  const std::string prompts = read_file(dir / "p" / "prompts.jsonl");
  CHECK(std::count(prompts.begin(), prompts.end(), '\n') == 30);
  CHECK(prompts.find("Please rewrite the essay and imitate its word using "
                     "habits:") != std::string::npos);

  write_file(dir / "gen.conf",
             "[gen]\n"
             "models = [\"m1\", \"m2\"]\n"
             "train_human = 12\n"
             "train_per_llm = 6\n"
             "test_human = 4\n"
             "test_per_llm = 2\n"
             "seed = 17\n"
             "concurrency = 3\n");
  REQUIRE(dispatch({"gen-run", "--config", (dir / "gen.conf").string(),
                    "--corpus", (dir / "essays.jsonl").string(), "--out",
                    (dir / "g").string()}) == 0);
  const LoadResult train_split = load_jsonl(dir / "g" / "rip_train.jsonl");
  const LoadResult test_split = load_jsonl(dir / "g" / "rip_test.jsonl");
  CHECK(train_split.records.size() == 12 + 2 * 6);
  CHECK(test_split.records.size() == 4 + 2 * 2);
  CHECK(train_split.manifest.count(Split::train, Label::aig, "m1") == 6);
  CHECK(test_split.manifest.count(Split::test, Label::aig, "m2") == 2);
  fs::remove_all(dir);
}
