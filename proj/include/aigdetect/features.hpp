#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aigdetect/common.hpp"

namespace aigdetect {

using TokenSeq = std::vector<std::string>;

/// Lowercases (ASCII), splits on Unicode whitespace and strips leading and
/// trailing punctuation from each token. Tokens that become empty are
/// dropped. Deterministic; tokenizing the space-joined output is a fixed
/// point.
TokenSeq tokenize(std::string_view text);

/// Token-probability table. A token is in-vocabulary iff it has an entry;
/// every stored probability lies in (0,1].
class Vocabulary {
 public:
  Vocabulary() = default;

  /// TSV format: one `token<TAB>probability` pair per line.
  static Vocabulary from_tsv(const std::filesystem::path& path);
  static Vocabulary from_pairs(
      const std::vector<std::pair<std::string, double>>& pairs,
      std::string source_name);

  bool contains(const std::string& token) const {
    return probs_.find(token) != probs_.end();
  }
  /// Probability of a token, or nullopt when out-of-vocabulary.
  std::optional<double> prob(const std::string& token) const {
    auto it = probs_.find(token);
    if (it == probs_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return probs_.size(); }
  const std::string& source_name() const { return source_name_; }

  void save_tsv(const std::filesystem::path& path) const;

 private:
  std::unordered_map<std::string, double> probs_;
  std::string source_name_;
};

/// Shannon entropy over token occurrences: -sum_i p(x_i) ln p(x_i).
/// Out-of-vocabulary tokens contribute 0 unless an explicit floor
/// probability is given, in which case they contribute -floor*ln(floor).
/// The probability source the score is comparable against is fixed by the
/// vocabulary, so the default keeps OOV mass out of the entropy signal.
double entropy(const TokenSeq& tokens, const Vocabulary& vocab,
               std::optional<double> oov_floor = std::nullopt);

/// Fraction of tokens absent from the vocabulary. Undefined (error) on an
/// empty token sequence.
double oov_ratio(const TokenSeq& tokens, const Vocabulary& vocab);

struct FeatureVector {
  std::vector<double> values;
  std::size_t dim() const { return values.size(); }
};

inline constexpr std::size_t kDefaultFeatureDim = 1028;
inline constexpr std::size_t kStatFeatureCount = 4;
inline constexpr std::size_t kMinFeatureDim = 8;

/// Seed folded into the FNV-1a bucket hash; fixed so feature vectors are
/// stable across runs and platforms.
inline constexpr std::uint64_t kFeatureHashSeed = 0x4149474445544543ULL;

/// Raw (unnormalized) bucket counts of the character 2-grams and 3-grams of
/// the space-joined token stream, folded into n_buckets via FNV-1a.
std::vector<double> hashed_ngram_counts(const TokenSeq& tokens,
                                        std::size_t n_buckets);

/// Fixed-dimension representation: L2-normalized hashed n-gram counts in the
/// first dim-4 slots, then 4 statistics — entropy, entropy per token,
/// OOV ratio (0 for empty texts) and ln(1 + token count).
FeatureVector featurize(std::string_view text, const Vocabulary& vocab,
                        std::size_t dim = kDefaultFeatureDim);

}  // namespace aigdetect
