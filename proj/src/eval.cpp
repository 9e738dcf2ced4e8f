#include "aigdetect/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "json.hpp"

namespace aigdetect {

namespace {

void check_finite(std::span<const double> scores, const char* which) {
  for (double s : scores) {
    if (!std::isfinite(s)) {
      fail(Errc::non_finite,
           std::string("eval: non-finite ") + which + " score");
    }
  }
}

}  // namespace

AucScore compute_auc(std::span<const double> pos_scores,
                     std::span<const double> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    fail(Errc::empty_input, "eval: AUC needs both classes non-empty");
  }
  check_finite(pos_scores, "positive");
  check_finite(neg_scores, "negative");

  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> entries;
  entries.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) entries.push_back({s, true});
  for (double s : neg_scores) entries.push_back({s, false});
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });

  // Tie group [i, j) gets average 1-based rank (i+1+j)/2; accumulating twice
  // the rank keeps everything in integers.
  std::uint64_t twice_rank_sum_pos = 0;
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].score == entries[i].score) ++j;
    const std::uint64_t twice_rank = static_cast<std::uint64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (entries[k].positive) twice_rank_sum_pos += twice_rank;
    }
    i = j;
  }
  const std::uint64_t n_pos = pos_scores.size();
  const std::uint64_t n_neg = neg_scores.size();
  const std::uint64_t twice_u = twice_rank_sum_pos - n_pos * (n_pos + 1);
  AucScore auc;
  auc.value = static_cast<double>(twice_u) /
              static_cast<double>(2 * n_pos * n_neg);
  auc.n_pos = n_pos;
  auc.n_neg = n_neg;
  return auc;
}

std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    fail(Errc::invalid_argument, "eval: scores/labels size mismatch");
  }
  std::size_t n_pos = 0, n_neg = 0;
  for (int y : labels) {
    if (y == 1) {
      ++n_pos;
    } else if (y == 0) {
      ++n_neg;
    } else {
      fail(Errc::invalid_argument, "eval: labels must be 0 or 1");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    fail(Errc::empty_input, "eval: ROC needs both classes non-empty");
  }
  check_finite(scores, "roc");

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) {
        ++tp;
      } else {
        ++fp;
      }
      ++j;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                     static_cast<double>(tp) / static_cast<double>(n_pos)});
    i = j;
  }
  return curve;
}

double trapezoid_area(const std::vector<RocPoint>& curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    area += (curve[k].fpr - curve[k - 1].fpr) *
            (curve[k].tpr + curve[k - 1].tpr) * 0.5;
  }
  return area;
}

AucScore evaluate_subset(const ScorerParams& params, const TestSubset& subset,
                         const Vocabulary& vocab) {
  std::vector<double> pos, neg;
  for (const TextRecord& r : subset.records) {
    const FeatureVector fv = featurize(r.text, vocab, params.d);
    const double s = score(params, fv);
    if (r.label == Label::aig) {
      pos.push_back(s);
    } else {
      neg.push_back(s);
    }
  }
  return compute_auc(pos, neg);
}

const AucMatrix::Cell& AucMatrix::at(const std::string& train_family,
                                     const std::string& test_family) const {
  auto it = cells.find({train_family, test_family});
  if (it == cells.end()) {
    fail(Errc::missing_pairs, "eval: no cell (" + train_family + ", " +
                                  test_family + ") in matrix");
  }
  return it->second;
}

namespace {

// Case-insensitive order with a case-sensitive tiebreak, so family rows and
// columns come out in a stable, human-expected order.
bool family_less(const std::string& a, const std::string& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const char ca = static_cast<char>(std::tolower(a[i]));
    const char cb = static_cast<char>(std::tolower(b[i]));
    if (ca != cb) return ca < cb;
  }
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

AucMatrix family_matrix(const PairEvaluations& evaluations,
                        const std::map<std::string, std::string>& family_of) {
  if (evaluations.empty()) {
    fail(Errc::empty_input, "eval: no evaluations to aggregate");
  }
  auto family = [&](const std::string& model) -> const std::string& {
    auto it = family_of.find(model);
    if (it == family_of.end()) {
      fail(Errc::unknown_family, "eval: model '" + model + "' has no family");
    }
    return it->second;
  };

  std::map<std::string, std::set<std::string>> train_models_by_family;
  std::map<std::string, std::set<std::string>> test_models_by_family;
  for (const auto& [pair, auc] : evaluations) {
    train_models_by_family[family(pair.first)].insert(pair.first);
    test_models_by_family[family(pair.second)].insert(pair.second);
  }

  AucMatrix matrix;
  for (const auto& [fam, models] : train_models_by_family) {
    matrix.train_families.push_back(fam);
  }
  for (const auto& [fam, models] : test_models_by_family) {
    matrix.test_families.push_back(fam);
  }
  std::sort(matrix.train_families.begin(), matrix.train_families.end(),
            family_less);
  std::sort(matrix.test_families.begin(), matrix.test_families.end(),
            family_less);

  std::vector<std::string> missing;
  for (const std::string& ftrain : matrix.train_families) {
    for (const std::string& ftest : matrix.test_families) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const std::string& mtrain : train_models_by_family[ftrain]) {
        for (const std::string& mtest : test_models_by_family[ftest]) {
          auto it = evaluations.find({mtrain, mtest});
          if (it == evaluations.end()) {
            missing.push_back("(" + mtrain + ", " + mtest + ")");
            continue;
          }
          sum += it->second.value;
          ++count;
        }
      }
      if (count > 0) {
        matrix.cells[{ftrain, ftest}] = {sum / static_cast<double>(count),
                                         count};
      }
    }
  }
  if (!missing.empty()) {
    std::string joined;
    for (const std::string& m : missing) {
      if (!joined.empty()) joined += ", ";
      joined += m;
    }
    fail(Errc::missing_pairs,
         "eval: evaluations missing for pairs: " + joined);
  }
  return matrix;
}

SuperSummary super_summary(const std::vector<AucScore>& scores) {
  if (scores.size() < 2) {
    fail(Errc::invalid_argument,
         "eval: summary needs at least 2 subset scores");
  }
  SuperSummary s;
  s.n_subsets = scores.size();
  bool all_equal = true;
  for (const AucScore& a : scores) {
    s.mean += a.value;
    all_equal = all_equal && a.value == scores.front().value;
  }
  if (all_equal) {
    // exact result; the accumulate-and-divide path would pick up noise
    s.mean = scores.front().value;
    s.sd = 0.0;
    return s;
  }
  s.mean /= static_cast<double>(scores.size());
  double ss = 0.0;
  for (const AucScore& a : scores) {
    ss += (a.value - s.mean) * (a.value - s.mean);
  }
  s.sd = std::sqrt(ss / static_cast<double>(scores.size() - 1));
  return s;
}

std::string matrix_to_csv(const AucMatrix& matrix) {
  std::string out = "train_family";
  for (const std::string& ftest : matrix.test_families) {
    out += ',';
    out += ftest;
  }
  out += '\n';
  for (const std::string& ftrain : matrix.train_families) {
    out += ftrain;
    for (const std::string& ftest : matrix.test_families) {
      out += ',';
      out += fmt_fixed(matrix.at(ftrain, ftest).mean, 3);
    }
    out += '\n';
  }
  return out;
}

std::string matrix_counts_to_json(const AucMatrix& matrix) {
  nlohmann::ordered_json j;
  j["train_families"] = matrix.train_families;
  j["test_families"] = matrix.test_families;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const std::string& ftrain : matrix.train_families) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (const std::string& ftest : matrix.test_families) {
      row[ftest] = matrix.at(ftrain, ftest).pair_count;
    }
    counts[ftrain] = std::move(row);
  }
  j["pair_counts"] = std::move(counts);
  return j.dump(2) + "\n";
}

std::string subset_results_to_csv(const std::vector<SubsetResult>& results) {
  std::string out = "model,family,auc,n_pos,n_neg\n";
  for (const SubsetResult& r : results) {
    out += r.model;
    out += ',';
    out += r.family;
    out += ',';
    out += fmt_fixed(r.auc.value, 9);
    out += ',';
    out += std::to_string(r.auc.n_pos);
    out += ',';
    out += std::to_string(r.auc.n_neg);
    out += '\n';
  }
  return out;
}

}  // namespace aigdetect
