#include "aigdetect/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace aigdetect {

namespace {

// Decodes one UTF-8 codepoint starting at i; advances i past it. Invalid
// bytes are passed through one at a time as their own "codepoint".
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(s[k]);
  };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int extra;
  char32_t cp;
  if ((b0 & 0xe0) == 0xc0) {
    extra = 1;
    cp = b0 & 0x1f;
  } else if ((b0 & 0xf0) == 0xe0) {
    extra = 2;
    cp = b0 & 0x0f;
  } else if ((b0 & 0xf8) == 0xf0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    ++i;
    return b0;
  }
  if (i + static_cast<std::size_t>(extra) >= s.size()) {
    // truncated sequence
    ++i;
    return b0;
  }
  for (int k = 1; k <= extra; ++k) {
    unsigned char bk = byte(i + static_cast<std::size_t>(k));
    if ((bk & 0xc0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3f);
  }
  i += static_cast<std::size_t>(extra) + 1;
  return cp;
}

bool is_space_cp(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
    case 0x0085: case 0x00a0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202f: case 0x205f: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200a;
  }
}

bool is_strip_punct_cp(char32_t cp) {
  if (cp < 0x80) {
    return std::ispunct(static_cast<int>(cp)) != 0;
  }
  switch (cp) {
    case 0x2018: case 0x2019: case 0x201c: case 0x201d:  // curly quotes
    case 0x2013: case 0x2014:                            // en/em dash
    case 0x2026:                                         // ellipsis
    case 0x00ab: case 0x00bb:                            // guillemets
    case 0x00a1: case 0x00bf:                            // inverted marks
      return true;
    default:
      return false;
  }
}

void append_cp_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

}  // namespace

TokenSeq tokenize(std::string_view text) {
  TokenSeq tokens;
  std::vector<char32_t> current;
  auto flush = [&] {
    if (current.empty()) return;
    std::size_t b = 0, e = current.size();
    while (b < e && is_strip_punct_cp(current[b])) ++b;
    while (e > b && is_strip_punct_cp(current[e - 1])) --e;
    if (b < e) {
      std::string token;
      for (std::size_t k = b; k < e; ++k) append_cp_utf8(token, current[k]);
      tokens.push_back(std::move(token));
    }
    current.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = decode_utf8(text, i);
    if (is_space_cp(cp)) {
      flush();
    } else {
      if (cp >= U'A' && cp <= U'Z') cp = cp - U'A' + U'a';
      current.push_back(cp);
    }
  }
  flush();
  return tokens;
}

Vocabulary Vocabulary::from_tsv(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  Vocabulary v;
  v.source_name_ = path.string();
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    const auto where = " (line " + std::to_string(line_no) + ")";
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      fail(Errc::vocab_format, "features: expected token<TAB>probability" +
                                   where);
    }
    std::string token = line.substr(0, tab);
    double prob;
    try {
      std::size_t used = 0;
      prob = std::stod(line.substr(tab + 1), &used);
      if (!trim_view(std::string_view(line).substr(tab + 1 + used)).empty()) {
        fail(Errc::vocab_format,
             "features: trailing characters after probability" + where);
      }
    } catch (const std::logic_error&) {
      fail(Errc::vocab_format, "features: unparsable probability" + where);
    }
    if (!(prob > 0.0 && prob <= 1.0)) {
      fail(Errc::vocab_format,
           "features: probability outside (0,1]" + where);
    }
    if (!v.probs_.emplace(std::move(token), prob).second) {
      fail(Errc::vocab_format, "features: duplicate token" + where);
    }
  }
  return v;
}

Vocabulary Vocabulary::from_pairs(
    const std::vector<std::pair<std::string, double>>& pairs,
    std::string source_name) {
  Vocabulary v;
  v.source_name_ = std::move(source_name);
  for (const auto& [token, prob] : pairs) {
    if (!(prob > 0.0 && prob <= 1.0)) {
      fail(Errc::vocab_format, "features: probability outside (0,1] for '" +
                                   token + "'");
    }
    if (!v.probs_.emplace(token, prob).second) {
      fail(Errc::vocab_format, "features: duplicate token '" + token + "'");
    }
  }
  return v;
}

void Vocabulary::save_tsv(const std::filesystem::path& path) const {
  std::vector<std::pair<std::string, double>> sorted(probs_.begin(),
                                                     probs_.end());
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& [token, prob] : sorted) {
    out += token;
    out += '\t';
    out += fmt_double(prob);
    out += '\n';
  }
  write_file(path, out);
}

double entropy(const TokenSeq& tokens, const Vocabulary& vocab,
               std::optional<double> oov_floor) {
  if (oov_floor && !(*oov_floor > 0.0 && *oov_floor <= 1.0)) {
    fail(Errc::invalid_argument, "features: OOV floor outside (0,1]");
  }
  double h = 0.0;
  for (const std::string& token : tokens) {
    if (auto p = vocab.prob(token)) {
      h -= *p * std::log(*p);
    } else if (oov_floor) {
      h -= *oov_floor * std::log(*oov_floor);
    }
  }
  return std::max(h, 0.0);
}

double oov_ratio(const TokenSeq& tokens, const Vocabulary& vocab) {
  if (tokens.empty()) {
    fail(Errc::empty_input,
         "features: OOV ratio undefined for an empty token sequence");
  }
  std::size_t oov = 0;
  for (const std::string& token : tokens) {
    if (!vocab.contains(token)) ++oov;
  }
  return static_cast<double>(oov) / static_cast<double>(tokens.size());
}

std::vector<double> hashed_ngram_counts(const TokenSeq& tokens,
                                        std::size_t n_buckets) {
  if (n_buckets == 0) {
    fail(Errc::invalid_argument, "features: zero n-gram buckets");
  }
  std::string joined;
  for (const std::string& t : tokens) {
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  std::vector<double> counts(n_buckets, 0.0);
  auto add = [&](std::size_t pos, std::size_t len) {
    std::uint64_t h = fnv1a64(std::string_view(joined).substr(pos, len),
                              kFeatureHashSeed);
    counts[h % n_buckets] += 1.0;
  };
  for (std::size_t i = 0; i + 2 <= joined.size(); ++i) add(i, 2);
  for (std::size_t i = 0; i + 3 <= joined.size(); ++i) add(i, 3);
  return counts;
}

FeatureVector featurize(std::string_view text, const Vocabulary& vocab,
                        std::size_t dim) {
  if (dim < kMinFeatureDim) {
    fail(Errc::invalid_argument, "features: dimension must be >= " +
                                     std::to_string(kMinFeatureDim));
  }
  const TokenSeq tokens = tokenize(text);
  const std::size_t n_buckets = dim - kStatFeatureCount;

  FeatureVector fv;
  fv.values = hashed_ngram_counts(tokens, n_buckets);
  double norm2 = 0.0;
  for (double c : fv.values) norm2 += c * c;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& c : fv.values) c *= inv;
  }

  const double n = static_cast<double>(tokens.size());
  const double h = entropy(tokens, vocab);
  fv.values.push_back(h);
  fv.values.push_back(tokens.empty() ? 0.0 : h / n);
  fv.values.push_back(tokens.empty() ? 0.0 : oov_ratio(tokens, vocab));
  fv.values.push_back(std::log1p(n));
  return fv;
}

}  // namespace aigdetect
