#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aigdetect/common.hpp"
#include "aigdetect/corpus.hpp"
#include "aigdetect/features.hpp"
#include "aigdetect/scorer.hpp"

namespace aigdetect {

struct AucScore {
  double value = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

/// Pairwise-concordance AUC with 0.5 credit for ties, computed by sorting
/// and tie-averaged ranks in O(n log n). The numerator is accumulated in
/// integer arithmetic, so the result is the exact rational
/// (2*wins + ties) / (2 * n_pos * n_neg) rounded once to double.
AucScore compute_auc(std::span<const double> pos_scores,
                     std::span<const double> neg_scores);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// ROC points at every distinct threshold, from (0,0) to (1,1); ties are
/// grouped, so the trapezoidal area equals compute_auc.
std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const int> labels);

double trapezoid_area(const std::vector<RocPoint>& curve);

/// Scores every record of the subset (aig = positive class) and returns the
/// AUC of the scorer on it.
AucScore evaluate_subset(const ScorerParams& params, const TestSubset& subset,
                         const Vocabulary& vocab);

struct SubsetResult {
  std::string model;
  std::string family;
  AucScore auc;
};

/// Grid of mean AUC scores indexed by (training family, test family).
struct AucMatrix {
  struct Cell {
    double mean = 0.0;
    std::size_t pair_count = 0;
  };
  std::vector<std::string> train_families;
  std::vector<std::string> test_families;
  std::map<std::pair<std::string, std::string>, Cell> cells;

  const Cell& at(const std::string& train_family,
                 const std::string& test_family) const;
};

using PairEvaluations =
    std::map<std::pair<std::string, std::string>, AucScore>;

/// Aggregates per-(train model, test model) AUC scores into family-level
/// means. Every model must have a family; each reported cell must cover the
/// full cross product of its train and test models.
AucMatrix family_matrix(const PairEvaluations& evaluations,
                        const std::map<std::string, std::string>& family_of);

struct SuperSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n-1)
  std::size_t n_subsets = 0;
};

SuperSummary super_summary(const std::vector<AucScore>& scores);

// ---------------------------------------------------------------------------
// report emission
// ---------------------------------------------------------------------------

/// CSV with test families as columns and train families as rows, cells as
/// 3-decimal means.
std::string matrix_to_csv(const AucMatrix& matrix);
/// Companion JSON carrying the contributing pair count per cell.
std::string matrix_counts_to_json(const AucMatrix& matrix);

/// CSV rows: model,family,auc,n_pos,n_neg.
std::string subset_results_to_csv(const std::vector<SubsetResult>& results);

}  // namespace aigdetect
