#include "aigdetect/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace aigdetect {

namespace {
using nlohmann::json;
using nlohmann::ordered_json;
}  // namespace

std::string to_string(Label label) {
  return label == Label::human ? "human" : "aig";
}

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "train";
}

Label label_from_string(std::string_view s) {
  if (s == "human") return Label::human;
  if (s == "aig") return Label::aig;
  fail(Errc::malformed_record,
       "corpus: unknown label '" + std::string(s) + "'");
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "validation") return Split::validation;
  if (s == "test") return Split::test;
  fail(Errc::malformed_record,
       "corpus: unknown split '" + std::string(s) + "'");
}

std::size_t CorpusManifest::total() const {
  std::size_t n = 0;
  for (const auto& [key, count] : counts) n += count;
  return n;
}

std::size_t CorpusManifest::count(Split split, Label label,
                                  std::string_view model) const {
  auto it = counts.find(Key{split, label, std::string(model)});
  return it == counts.end() ? 0 : it->second;
}

namespace {

void validate_one(const TextRecord& r, const std::string& where) {
  const bool has_model = r.generator_model.has_value();
  const bool has_family = r.generator_family.has_value();
  if (r.label == Label::human) {
    if (has_model || has_family) {
      fail(Errc::label_inconsistency,
           "corpus: human record carries generator metadata" + where);
    }
  } else {
    if (!has_model || !has_family || r.generator_model->empty() ||
        r.generator_family->empty()) {
      fail(Errc::label_inconsistency,
           "corpus: aig record missing generator model/family" + where);
    }
  }
  if (trim_view(r.text).empty()) {
    fail(Errc::malformed_record, "corpus: empty text" + where);
  }
  if (r.id.empty()) {
    fail(Errc::malformed_record, "corpus: empty id" + where);
  }
}

}  // namespace

void validate_records(const std::vector<TextRecord>& records) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(records.size());
  for (const TextRecord& r : records) {
    validate_one(r, " (id '" + r.id + "')");
    if (!seen.insert(r.id).second) {
      fail(Errc::duplicate_id, "corpus: duplicate id '" + r.id + "'");
    }
  }
}

CorpusManifest build_manifest(const std::vector<TextRecord>& records) {
  CorpusManifest m;
  for (const TextRecord& r : records) {
    std::string model =
        r.label == Label::aig ? *r.generator_model : std::string();
    ++m.counts[CorpusManifest::Key{r.split, r.label, std::move(model)}];
    m.domains.insert(r.domain);
  }
  return m;
}

namespace {

TextRecord record_from_json(const json& j, std::size_t line_no) {
  const std::string where = " (line " + std::to_string(line_no) + ")";
  if (!j.is_object()) {
    fail(Errc::malformed_record, "corpus: line is not a JSON object" + where);
  }
  auto require_string = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      fail(Errc::malformed_record,
           std::string("corpus: missing or non-string field '") + key + "'" +
               where);
    }
    return it->get<std::string>();
  };
  TextRecord r;
  r.id = require_string("id");
  r.text = require_string("text");
  r.label = label_from_string(require_string("label"));
  r.domain = require_string("domain");
  r.split = split_from_string(require_string("split"));
  auto optional_string = [&](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
      fail(Errc::malformed_record,
           std::string("corpus: non-string field '") + key + "'" + where);
    }
    return it->get<std::string>();
  };
  r.generator_model = optional_string("generator_model");
  r.generator_family = optional_string("generator_family");
  return r;
}

}  // namespace

LoadResult load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::io_failure, "corpus: cannot open '" + path.string() + "'");
  }
  LoadResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) {
      fail(Errc::malformed_record,
           "corpus: blank line (line " + std::to_string(line_no) + ")");
    }
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      fail(Errc::malformed_record,
           "corpus: invalid JSON (line " + std::to_string(line_no) + ")");
    }
    TextRecord r = record_from_json(j, line_no);
    try {
      validate_one(r, " (line " + std::to_string(line_no) + ")");
    } catch (const Error&) {
      throw;
    }
    if (!seen.insert(r.id).second) {
      fail(Errc::duplicate_id, "corpus: duplicate id '" + r.id + "' (line " +
                                   std::to_string(line_no) + ")");
    }
    result.records.push_back(std::move(r));
  }
  if (in.bad()) {
    fail(Errc::io_failure, "corpus: read failed for '" + path.string() + "'");
  }
  result.manifest = build_manifest(result.records);
  return result;
}

void save_jsonl(const std::vector<TextRecord>& records,
                const std::filesystem::path& path) {
  validate_records(records);
  std::string out;
  for (const TextRecord& r : records) {
    ordered_json j;
    j["id"] = r.id;
    j["text"] = r.text;
    j["label"] = to_string(r.label);
    if (r.generator_model) j["generator_model"] = *r.generator_model;
    if (r.generator_family) j["generator_family"] = *r.generator_family;
    j["domain"] = r.domain;
    j["split"] = to_string(r.split);
    out += j.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<TestSubset> make_llm_subsets(
    const std::vector<TextRecord>& records) {
  std::vector<const TextRecord*> humans;
  std::map<std::string, std::vector<const TextRecord*>> by_model;
  for (const TextRecord& r : records) {
    if (r.split != Split::test) {
      fail(Errc::invalid_argument,
           "corpus: non-test record '" + r.id + "' in test stratification");
    }
    if (r.label == Label::human) {
      humans.push_back(&r);
    } else {
      by_model[*r.generator_model].push_back(&r);
    }
  }
  if (humans.empty()) {
    fail(Errc::empty_input, "corpus: no human records to stratify against");
  }
  std::vector<TestSubset> subsets;
  subsets.reserve(by_model.size());
  for (const auto& [model, recs] : by_model) {
    TestSubset s;
    s.model = model;
    s.records.reserve(humans.size() + recs.size());
    for (const TextRecord* h : humans) s.records.push_back(*h);
    for (const TextRecord* a : recs) s.records.push_back(*a);
    subsets.push_back(std::move(s));
  }
  return subsets;
}

// ---------------------------------------------------------------------------
// synthetic corpora
// ---------------------------------------------------------------------------

SynthClassParams synth_class_params(const SynthConfig& config, Label label) {
  if (!(config.separability >= 0.0 && config.separability <= 1.0)) {
    fail(Errc::invalid_argument, "corpus: separability outside [0,1]");
  }
  // The class signal is deliberately spread across many weak cues (style
  // exponent tilt, OOV mass, OOV token identity) instead of one dominant
  // feature axis.
  SynthClassParams p;
  if (label == Label::human) {
    p.zipf_exponent = kSynthBaseZipfExponent;
    p.oov_rate = 0.02 + 0.06 * config.separability;
  } else {
    p.zipf_exponent = kSynthBaseZipfExponent + 0.15 * config.separability;
    p.oov_rate = 0.02;
  }
  return p;
}

std::string synth_token(std::size_t index) {
  static constexpr std::string_view consonants = "bcdfghjklmnpqrstvwz";
  static constexpr std::string_view vowels = "aeiou";
  const std::size_t base = consonants.size() * vowels.size();
  std::string word;
  std::size_t n = index;
  do {
    std::size_t digit = n % base;
    word.insert(0, 1, vowels[digit % vowels.size()]);
    word.insert(0, 1, consonants[digit / vowels.size()]);
    n /= base;
  } while (n > 0);
  return word;
}

namespace {

void check_synth_config(const SynthConfig& config) {
  if (config.n_human < 1 || config.n_aig < 1) {
    fail(Errc::invalid_argument, "corpus: synthetic counts must be >= 1");
  }
  if (!(config.separability >= 0.0 && config.separability <= 1.0)) {
    fail(Errc::invalid_argument, "corpus: separability outside [0,1]");
  }
  if (config.vocab_size < 2) {
    fail(Errc::invalid_argument, "corpus: vocab_size must be >= 2");
  }
}

/// Cumulative Zipf table over [0, vocab_size): weight(i) ~ (i+1)^-s.
std::vector<double> zipf_cdf(std::size_t vocab_size, double exponent) {
  std::vector<double> cdf(vocab_size);
  double acc = 0.0;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    acc += std::pow(static_cast<double>(i + 1), -exponent);
    cdf[i] = acc;
  }
  for (double& c : cdf) c /= acc;
  cdf.back() = 1.0;
  return cdf;
}

std::size_t sample_cdf(const std::vector<double>& cdf, std::mt19937_64& rng) {
  double u = uniform_unit(rng);
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

constexpr std::size_t kOovPoolSize = 1024;
constexpr std::size_t kOovPoolWidth = 512;
constexpr std::size_t kMinTokens = 40;
constexpr std::size_t kMaxTokens = 80;
constexpr std::size_t kTopicCount = 64;
constexpr double kTopicWeight = 0.6;

// Each record mixes a class-conditional Zipf "style" distribution with a
// per-record topic block drawn uniformly from the vocabulary. Topics are
// class-neutral: they spread within-class variance over many directions so
// the class signal stays a distributed, weak-feature property rather than
// the dominant variance axis of the corpus. The classes also draw their
// OOV tokens from pool windows whose overlap shrinks as separability
// grows.
std::string synth_text(const std::vector<double>& style_cdf, double oov_rate,
                       std::size_t oov_window_start, std::size_t vocab_size,
                       std::mt19937_64& rng) {
  const std::size_t block = std::max<std::size_t>(1, vocab_size / kTopicCount);
  const std::size_t topic_lo =
      std::min(uniform_below(rng, kTopicCount) * block, vocab_size - 1);
  const std::size_t topic_width =
      std::min(block, vocab_size - topic_lo);
  const std::size_t len =
      kMinTokens + uniform_below(rng, kMaxTokens - kMinTokens + 1);
  std::string text;
  for (std::size_t t = 0; t < len; ++t) {
    std::size_t index;
    if (uniform_unit(rng) < oov_rate) {
      index = vocab_size + oov_window_start +
              uniform_below(rng, kOovPoolWidth);
    } else if (uniform_unit(rng) < kTopicWeight) {
      index = topic_lo + uniform_below(rng, topic_width);
    } else {
      index = sample_cdf(style_cdf, rng);
    }
    if (!text.empty()) text += ' ';
    text += synth_token(index);
  }
  return text;
}

// Window offset of a class's OOV pool inside [0, kOovPoolSize): identical
// windows at separability 0, disjoint at 1.
std::size_t oov_window_start(const SynthConfig& config, Label label) {
  if (label == Label::human) return 0;
  return static_cast<std::size_t>(
      std::llround(config.separability *
                   static_cast<double>(kOovPoolSize - kOovPoolWidth)));
}

}  // namespace

std::vector<std::pair<std::string, double>> synthetic_token_probs(
    std::size_t vocab_size) {
  if (vocab_size < 2) {
    fail(Errc::invalid_argument, "corpus: vocab_size must be >= 2");
  }
  std::vector<double> weights(vocab_size);
  double total = 0.0;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    weights[i] = std::pow(static_cast<double>(i + 1), -kSynthRefExponent);
    total += weights[i];
  }
  std::vector<std::pair<std::string, double>> probs;
  probs.reserve(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    probs.emplace_back(synth_token(i), kSynthVocabMass * weights[i] / total);
  }
  return probs;
}

std::vector<TextRecord> generate_synthetic_corpus(const SynthConfig& config,
                                                  Split split,
                                                  std::string_view id_prefix) {
  check_synth_config(config);
  const SynthClassParams human = synth_class_params(config, Label::human);
  const SynthClassParams aig = synth_class_params(config, Label::aig);
  const std::vector<double> human_cdf =
      zipf_cdf(config.vocab_size, human.zipf_exponent);
  const std::vector<double> aig_cdf =
      zipf_cdf(config.vocab_size, aig.zipf_exponent);

  std::mt19937_64 rng(config.seed);
  std::vector<TextRecord> records;
  records.reserve(config.n_human + config.n_aig);

  char id_buf[32];
  for (std::size_t i = 0; i < config.n_human; ++i) {
    TextRecord r;
    std::snprintf(id_buf, sizeof(id_buf), "h%06zu", i + 1);
    r.id = std::string(id_prefix) + id_buf;
    r.text = synth_text(human_cdf, human.oov_rate,
                        oov_window_start(config, Label::human),
                        config.vocab_size, rng);
    r.label = Label::human;
    r.domain = "synth";
    r.split = split;
    records.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < config.n_aig; ++i) {
    TextRecord r;
    std::snprintf(id_buf, sizeof(id_buf), "a%06zu", i + 1);
    r.id = std::string(id_prefix) + id_buf;
    r.text = synth_text(aig_cdf, aig.oov_rate,
                        oov_window_start(config, Label::aig),
                        config.vocab_size, rng);
    r.label = Label::aig;
    r.generator_model = std::string(kSynthModelName);
    r.generator_family = std::string(kSynthFamilyName);
    r.domain = "synth";
    r.split = split;
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace aigdetect
