#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aigdetect/common.hpp"

namespace aigdetect {

enum class Label { human, aig };
enum class Split { train, validation, test };

std::string to_string(Label label);
std::string to_string(Split split);
Label label_from_string(std::string_view s);
Split split_from_string(std::string_view s);

/// One labeled text. For human records generator_model/generator_family are
/// absent; for aig records both are present and non-empty.
struct TextRecord {
  std::string id;
  std::string text;
  Label label = Label::human;
  std::optional<std::string> generator_model;
  std::optional<std::string> generator_family;
  std::string domain;
  Split split = Split::train;

  bool operator==(const TextRecord&) const = default;
};

struct CorpusManifest {
  struct Key {
    Split split;
    Label label;
    std::string model;  // empty for human records
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, std::size_t> counts;
  std::set<std::string> domains;

  std::size_t total() const;
  std::size_t count(Split split, Label label, std::string_view model = {}) const;
};

/// All human test records plus the test records of a single model.
struct TestSubset {
  std::string model;
  std::vector<TextRecord> records;
};

struct LoadResult {
  CorpusManifest manifest;
  std::vector<TextRecord> records;
};

/// Checks the per-record invariants and id uniqueness for a whole corpus.
void validate_records(const std::vector<TextRecord>& records);

CorpusManifest build_manifest(const std::vector<TextRecord>& records);

/// Loads a JSONL corpus (one record object per line). Unknown fields are
/// ignored; malformed lines, duplicate ids and label/model inconsistencies
/// are reported with their line number. Input order is preserved.
LoadResult load_jsonl(const std::filesystem::path& path);

void save_jsonl(const std::vector<TextRecord>& records,
                const std::filesystem::path& path);

/// Stratifies test records by generator model: one subset per distinct
/// model, each holding every human record plus that model's records.
/// Subsets are ordered by model name. No human records is an error; no aig
/// records yields an empty list.
std::vector<TestSubset> make_llm_subsets(const std::vector<TextRecord>& records);

// ---------------------------------------------------------------------------
// synthetic corpora
// ---------------------------------------------------------------------------

struct SynthConfig {
  std::size_t n_human = 1000;
  std::size_t n_aig = 1000;
  double separability = 0.9;  // in [0,1]
  std::size_t vocab_size = 5000;
  std::uint64_t seed = 0;
};

/// Per-class sampling parameters derived from a SynthConfig. At
/// separability 0 both classes share the same Zipf exponent and
/// out-of-vocabulary injection rate; as separability grows the aig class
/// becomes more repetitive (steeper exponent) while the human class injects
/// more OOV tokens.
struct SynthClassParams {
  double zipf_exponent;
  double oov_rate;
};

inline constexpr double kSynthBaseZipfExponent = 1.05;
/// The reference vocabulary (what entropy and OOV are computed against) is
/// decoupled from the class sampling distributions: its probabilities decay
/// much more gently, standing in for a slice of a large balanced corpus.
inline constexpr double kSynthRefExponent = 0.3;
/// Total probability mass of the synthetic vocabulary. The rendered tokens
/// stand in for a slice of a much larger reference corpus, so their
/// unigram probabilities sum well below 1; this also keeps per-text entropy
/// on the same scale as the other statistical features.
inline constexpr double kSynthVocabMass = 0.05;
inline constexpr std::string_view kSynthModelName = "synth-llm-1";
inline constexpr std::string_view kSynthFamilyName = "synthfam";

SynthClassParams synth_class_params(const SynthConfig& config, Label label);

/// Word-like rendering of a token index ("do", "kavi", ...). Indices below
/// the configured vocab_size form the in-vocabulary universe; higher indices
/// are used for OOV injection and never collide with lower ones.
std::string synth_token(std::size_t index);

/// Token-probability table of the synthetic reference vocabulary:
/// Zipf(kSynthBaseZipfExponent) over the first vocab_size rendered tokens,
/// normalized to sum to 1.
std::vector<std::pair<std::string, double>> synthetic_token_probs(
    std::size_t vocab_size);

/// Deterministic corpus generation: a pure function of (config, split,
/// id_prefix). Emits n_human human records followed by n_aig records
/// attributed to the synthetic model.
std::vector<TextRecord> generate_synthetic_corpus(
    const SynthConfig& config, Split split = Split::train,
    std::string_view id_prefix = {});

}  // namespace aigdetect
