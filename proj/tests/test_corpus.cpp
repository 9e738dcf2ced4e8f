#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <set>
#include <unordered_map>

#include "aigdetect/common.hpp"
#include "aigdetect/corpus.hpp"
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

TextRecord human_record(std::string id, std::string text,
                        Split split = Split::train) {
  TextRecord r;
  r.id = std::move(id);
  r.text = std::move(text);
  r.label = Label::human;
  r.domain = "cmv";
  r.split = split;
  return r;
}

TextRecord aig_record(std::string id, std::string text, std::string model,
                      std::string family, Split split = Split::train) {
  TextRecord r;
  r.id = std::move(id);
  r.text = std::move(text);
  r.label = Label::aig;
  r.generator_model = std::move(model);
  r.generator_family = std::move(family);
  r.domain = "cmv";
  r.split = split;
  return r;
}

}  // namespace

TEST_CASE("load_jsonl counts records per split/label/model") {
  const auto dir = testsupport::scratch_dir("corpus");
  const auto path = dir / "small.jsonl";
  std::string lines;
  lines +=
      R"({"id":"h1","text":"one","label":"human","domain":"cmv","split":"train"})"
      "\n";
  lines +=
      R"({"id":"h2","text":"two","label":"human","domain":"cmv","split":"train"})"
      "\n";
  for (int i = 0; i < 3; ++i) {
    lines += R"({"id":"a)" + std::to_string(i) +
             R"(","text":"gen","label":"aig","generator_model":"m1",)"
             R"("generator_family":"f1","domain":"cmv","split":"train"})"
             "\n";
  }
  write_file(path, lines);

  const LoadResult loaded = load_jsonl(path);
  CHECK(loaded.records.size() == 5);
  CHECK(loaded.manifest.count(Split::train, Label::human) == 2);
  CHECK(loaded.manifest.count(Split::train, Label::aig, "m1") == 3);
  CHECK(loaded.manifest.total() == 5);
  CHECK(loaded.manifest.domains == std::set<std::string>{"cmv"});
  // input order preserved
  CHECK(loaded.records[0].id == "h1");
  CHECK(loaded.records[4].id == "a2");
  fs::remove_all(dir);
}

TEST_CASE("load_jsonl of an empty file yields an empty corpus") {
  const auto dir = testsupport::scratch_dir("corpus");
  const auto path = dir / "empty.jsonl";
  write_file(path, "");
  const LoadResult loaded = load_jsonl(path);
  CHECK(loaded.records.empty());
  CHECK(loaded.manifest.counts.empty());
  CHECK(loaded.manifest.total() == 0);
  fs::remove_all(dir);
}

TEST_CASE("load_jsonl handles a cmv-shaped imbalanced corpus") {
  // 4,223 human / 20,388 aig training records
  std::vector<TextRecord> records;
  records.reserve(24611);
  for (std::size_t i = 0; i < 4223; ++i) {
    records.push_back(human_record("h" + std::to_string(i), "text"));
  }
  for (std::size_t i = 0; i < 20388; ++i) {
    records.push_back(
        aig_record("a" + std::to_string(i), "text", "m1", "f1"));
  }
  const auto dir = testsupport::scratch_dir("corpus");
  const auto path = dir / "cmv_shape.jsonl";
  save_jsonl(records, path);
  const LoadResult loaded = load_jsonl(path);
  CHECK(loaded.manifest.count(Split::train, Label::human) == 4223);
  CHECK(loaded.manifest.count(Split::train, Label::aig, "m1") == 20388);
  CHECK(loaded.records.size() == 24611);
  fs::remove_all(dir);
}

TEST_CASE("load_jsonl reports malformed lines with their line number") {
  const auto dir = testsupport::scratch_dir("corpus");
  const auto path = dir / "bad.jsonl";
  write_file(
      path,
      R"({"id":"h1","text":"x","label":"human","domain":"d","split":"train"})"
      "\nnot json at all\n");
  try {
    load_jsonl(path);
    FAIL_CHECK("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::malformed_record);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("load_jsonl rejects duplicate ids and label inconsistencies") {
  const auto dir = testsupport::scratch_dir("corpus");
  const auto dup = dir / "dup.jsonl";
  write_file(
      dup,
      R"({"id":"x","text":"a","label":"human","domain":"d","split":"train"})"
      "\n"
      R"({"id":"x","text":"b","label":"human","domain":"d","split":"train"})"
      "\n");
  expect_error(Errc::duplicate_id, [&] { load_jsonl(dup); });

  const auto bad_human = dir / "bad_human.jsonl";
  write_file(bad_human,
             R"({"id":"x","text":"a","label":"human","generator_model":"m",)"
             R"("generator_family":"f","domain":"d","split":"train"})"
             "\n");
  expect_error(Errc::label_inconsistency, [&] { load_jsonl(bad_human); });

  const auto bad_aig = dir / "bad_aig.jsonl";
  write_file(
      bad_aig,
      R"({"id":"x","text":"a","label":"aig","domain":"d","split":"train"})"
      "\n");
  expect_error(Errc::label_inconsistency, [&] { load_jsonl(bad_aig); });

  const auto blank_text = dir / "blank_text.jsonl";
  write_file(
      blank_text,
      R"({"id":"x","text":"  \t ","label":"human","domain":"d","split":"train"})"
      "\n");
  expect_error(Errc::malformed_record, [&] { load_jsonl(blank_text); });
  fs::remove_all(dir);
}

TEST_CASE("jsonl round-trip preserves records field by field") {
  std::vector<TextRecord> records;
  records.push_back(human_record("h1", "Plain text.", Split::validation));
  records.push_back(aig_record("a1", "With \"quotes\" and\nnewlines\t.",
                               "gpt-x", "openai", Split::test));
  records.push_back(
      aig_record("a2", "unicode: éè — ok", "llama-y", "meta"));
  SynthConfig cfg;
  cfg.n_human = 20;
  cfg.n_aig = 20;
  cfg.seed = 5;
  for (TextRecord& r : generate_synthetic_corpus(cfg, Split::test, "rt")) {
    records.push_back(std::move(r));
  }

  const auto dir = testsupport::scratch_dir("corpus");
  const auto path = dir / "roundtrip.jsonl";
  save_jsonl(records, path);
  const LoadResult loaded = load_jsonl(path);
  REQUIRE(loaded.records.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(loaded.records[i] == records[i]);
  }
  fs::remove_all(dir);
}

TEST_CASE("make_llm_subsets builds one subset per model") {
  SUBCASE("27 models yield 27 subsets") {
    std::vector<TextRecord> records;
    records.push_back(human_record("h1", "t", Split::test));
    records.push_back(human_record("h2", "t", Split::test));
    for (int m = 0; m < 27; ++m) {
      const std::string model = "model-" + std::to_string(m);
      records.push_back(aig_record("a" + std::to_string(m), "t", model,
                                   "fam", Split::test));
    }
    const auto subsets = make_llm_subsets(records);
    CHECK(subsets.size() == 27);
    for (const TestSubset& s : subsets) {
      CHECK(s.records.size() == 3);  // 2 humans + 1 model record
    }
  }

  SUBCASE("single model keeps every record in the one subset") {
    std::vector<TextRecord> records;
    records.push_back(human_record("h1", "t", Split::test));
    records.push_back(aig_record("a1", "t", "m", "f", Split::test));
    records.push_back(aig_record("a2", "t", "m", "f", Split::test));
    const auto subsets = make_llm_subsets(records);
    REQUIRE(subsets.size() == 1);
    CHECK(subsets[0].records.size() == records.size());
  }

  SUBCASE("2 humans + models {A:1, B:2} give subset sizes 3 and 4") {
    std::vector<TextRecord> records;
    records.push_back(human_record("h1", "t", Split::test));
    records.push_back(human_record("h2", "t", Split::test));
    records.push_back(aig_record("a1", "t", "A", "f", Split::test));
    records.push_back(aig_record("b1", "t", "B", "f", Split::test));
    records.push_back(aig_record("b2", "t", "B", "f", Split::test));
    const auto subsets = make_llm_subsets(records);
    REQUIRE(subsets.size() == 2);
    CHECK(subsets[0].model == "A");
    CHECK(subsets[0].records.size() == 3);
    CHECK(subsets[1].model == "B");
    CHECK(subsets[1].records.size() == 4);
  }

  SUBCASE("no human records is an error") {
    std::vector<TextRecord> records;
    records.push_back(aig_record("a1", "t", "m", "f", Split::test));
    expect_error(Errc::empty_input, [&] { make_llm_subsets(records); });
  }

  SUBCASE("no aig records yields an empty list") {
    std::vector<TextRecord> records;
    records.push_back(human_record("h1", "t", Split::test));
    CHECK(make_llm_subsets(records).empty());
  }

  SUBCASE("non-test records are rejected") {
    std::vector<TextRecord> records;
    records.push_back(human_record("h1", "t", Split::train));
    expect_error(Errc::invalid_argument, [&] { make_llm_subsets(records); });
  }
}

TEST_CASE("make_llm_subsets partitions aig records and shares humans") {
  std::mt19937_64 rng(99);
  std::vector<TextRecord> records;
  for (int h = 0; h < 10; ++h) {
    records.push_back(
        human_record("h" + std::to_string(h), "t", Split::test));
  }
  std::unordered_map<std::string, int> expected_by_model;
  for (int a = 0; a < 60; ++a) {
    const std::string model =
        "m" + std::to_string(uniform_below(rng, 5));
    records.push_back(aig_record("a" + std::to_string(a), "t", model, "f",
                                 Split::test));
    ++expected_by_model[model];
  }
  const auto subsets = make_llm_subsets(records);
  CHECK(subsets.size() == expected_by_model.size());
  std::unordered_map<std::string, int> seen;  // aig id -> appearances
  std::size_t total_aig = 0;
  for (const TestSubset& s : subsets) {
    std::size_t humans = 0;
    for (const TextRecord& r : s.records) {
      if (r.label == Label::human) {
        ++humans;
      } else {
        CHECK(*r.generator_model == s.model);
        ++seen[r.id];
        ++total_aig;
      }
    }
    CHECK(humans == 10);
  }
  CHECK(total_aig == 60);
  for (const auto& [id, count] : seen) {
    CHECK(count == 1);
  }
}

TEST_CASE("synthetic corpus is a pure function of its config") {
  SynthConfig cfg;
  cfg.n_human = 50;
  cfg.n_aig = 30;
  cfg.separability = 0.7;
  cfg.vocab_size = 500;
  cfg.seed = 1234;
  const auto a = generate_synthetic_corpus(cfg);
  const auto b = generate_synthetic_corpus(cfg);
  REQUIRE(a.size() == b.size());
  CHECK(a == b);
  CHECK(a.size() == 80);

  std::size_t humans = 0;
  std::set<std::string> ids;
  for (const TextRecord& r : a) {
    ids.insert(r.id);
    if (r.label == Label::human) {
      ++humans;
      CHECK(!r.generator_model.has_value());
    } else {
      CHECK(*r.generator_model == std::string(kSynthModelName));
      CHECK(*r.generator_family == std::string(kSynthFamilyName));
    }
  }
  CHECK(humans == 50);
  CHECK(ids.size() == a.size());

  // a different seed changes the texts
  cfg.seed = 1235;
  CHECK(generate_synthetic_corpus(cfg) != a);
}

TEST_CASE("separability zero collapses the class distributions") {
  SynthConfig cfg;
  cfg.separability = 0.0;
  const auto human = synth_class_params(cfg, Label::human);
  const auto aig = synth_class_params(cfg, Label::aig);
  CHECK(human.zipf_exponent == aig.zipf_exponent);
  CHECK(human.oov_rate == aig.oov_rate);

  cfg.separability = 0.9;
  const auto human9 = synth_class_params(cfg, Label::human);
  const auto aig9 = synth_class_params(cfg, Label::aig);
  CHECK(aig9.zipf_exponent > human9.zipf_exponent);
  CHECK(human9.oov_rate > aig9.oov_rate);
}

TEST_CASE("synthetic token rendering is injective over the index range") {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < 7000; ++i) {
    CHECK(seen.insert(synth_token(i)).second);
  }
  const auto probs = synthetic_token_probs(5000);
  CHECK(probs.size() == 5000);
  double total = 0.0;
  for (const auto& [token, p] : probs) {
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    total += p;
  }
  // the synthetic vocabulary is a slice of a larger reference corpus
  CHECK(total == doctest::Approx(kSynthVocabMass).epsilon(1e-12));
  // Zipf: nonincreasing over the index order
  for (std::size_t i = 1; i < probs.size(); ++i) {
    CHECK(probs[i].second <= probs[i - 1].second);
  }
}

TEST_CASE("synthetic config validation") {
  SynthConfig cfg;
  cfg.separability = 1.5;
  expect_error(Errc::invalid_argument,
               [&] { generate_synthetic_corpus(cfg); });
  cfg.separability = 0.5;
  cfg.n_human = 0;
  expect_error(Errc::invalid_argument,
               [&] { generate_synthetic_corpus(cfg); });
}
