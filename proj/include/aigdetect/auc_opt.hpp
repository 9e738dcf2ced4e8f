#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aigdetect/common.hpp"
#include "aigdetect/corpus.hpp"
#include "aigdetect/features.hpp"
#include "aigdetect/scorer.hpp"

namespace aigdetect {

/// Auxiliary variables of the AUC margin loss: trainable estimates of the
/// class score means (a, b), the nonnegative dual variable and the margin.
struct AUCMState {
  double a = 0.0;
  double b = 0.0;
  double alpha_dual = 0.0;
  double margin = 1.0;
};

struct TrainConfig {
  double learning_rate = 0.02;
  double inner_lr = 0.02;
  std::size_t batch_size = 32;
  double sampling_rate = 0.5;
  std::size_t epochs = 1;
  double margin = 1.0;
  std::uint64_t seed = 0;
};

void validate_train_config(const TrainConfig& config);

/// A minibatch: features plus 0/1 labels (1 = aig/positive). Valid batches
/// contain at least one example of each class.
struct Batch {
  std::vector<FeatureVector> features;
  std::vector<int> labels;
};

void validate_batch(const Batch& batch);

/// round-half-to-even of sampling_rate * batch_size.
std::size_t positives_per_batch(double sampling_rate, std::size_t batch_size);

/// Emits index batches with a fixed positive count per batch. Each class
/// cycles through an independently shuffled order and reshuffles when
/// exhausted, so the minority class is oversampled while staying fair:
/// within each class, occurrence counts of any two indices never differ by
/// more than one.
class DualSampler {
 public:
  DualSampler(const std::vector<int>& labels, std::size_t batch_size,
              double sampling_rate, std::uint64_t seed);

  /// Next batch of record indices, positives first.
  std::vector<std::size_t> next();

  std::size_t positives() const { return n_pos_per_batch_; }
  std::size_t negatives() const { return n_neg_per_batch_; }

 private:
  std::size_t take(std::vector<std::size_t>& order, std::size_t& cursor);

  std::vector<std::size_t> pos_order_;
  std::vector<std::size_t> neg_order_;
  std::size_t pos_cursor_ = 0;
  std::size_t neg_cursor_ = 0;
  std::size_t n_pos_per_batch_ = 0;
  std::size_t n_neg_per_batch_ = 0;
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// losses
// ---------------------------------------------------------------------------

/// Margin-based min-max AUC surrogate:
///   mean_pos[(s-a)^2] + mean_neg[(s-b)^2]
///   + 2*alpha*(margin - mean_pos[s] + mean_neg[s]) - alpha^2.
/// Undefined (error) on single-class batches.
double aucm_loss(std::span<const double> scores, std::span<const int> labels,
                 const AUCMState& state);

struct AucmGrad {
  std::vector<double> dscores;
  double da = 0.0;
  double db = 0.0;
  double dalpha = 0.0;
  double loss = 0.0;
};

AucmGrad aucm_grad(std::span<const double> scores,
                   std::span<const int> labels, const AUCMState& state);

/// Mean binary cross-entropy of the sigmoid link against 0/1 labels.
double ce_loss(std::span<const double> scores, std::span<const int> labels);

/// d(mean CE)/d(score_i) = (sigmoid(s_i) - y_i) / batch_size.
std::vector<double> ce_score_grad(std::span<const double> scores,
                                  std::span<const int> labels);

/// Gradient of the mean cross-entropy w.r.t. all scorer parameters.
std::vector<double> ce_param_grad(const ScorerParams& params,
                                  const Batch& batch);

/// AUC loss after one inner cross-entropy step:
///   L_AUC(w - inner_lr * grad_CE(w)).
double compositional_loss(const ScorerParams& params, const Batch& batch,
                          const AUCMState& state, double inner_lr);

/// Same objective with the inner cross-entropy gradient supplied as a fixed
/// vector. The outer differentiation treats that inner step as constant
/// (first-order rule), so this is the exact function the analytic gradient
/// differentiates; finite-difference oracles probe it.
double compositional_loss_at(const ScorerParams& params, const Batch& batch,
                             const AUCMState& state, double inner_lr,
                             std::span<const double> frozen_inner_grad);

struct CompositionalGrad {
  std::vector<double> dparams;  // flat layout, matching ScorerParams::flat
  double da = 0.0;
  double db = 0.0;
  double dalpha = 0.0;
  double loss = 0.0;
};

CompositionalGrad compositional_grad(const ScorerParams& params,
                                     const Batch& batch,
                                     const AUCMState& state, double inner_lr);

// ---------------------------------------------------------------------------
// optimizer
// ---------------------------------------------------------------------------

struct StepResult {
  ScorerParams params;
  AUCMState state;
  double loss = 0.0;
};

/// One primal-dual step: descend (w, a, b) along the compositional loss
/// gradient, ascend alpha along d loss/d alpha, then project alpha to >= 0.
StepResult pdsca_step(const ScorerParams& params, const AUCMState& state,
                      const Batch& batch, const TrainConfig& config);

struct TrainResult {
  ScorerParams params;
  std::vector<double> loss_history;  // one compositional loss value per batch
};

/// Full training loop: featurizes the records, runs
/// epochs * ceil(N / batch_size) optimizer steps over dual-sampled batches.
/// Deterministic: the scorer is initialized from config.seed and the sampler
/// from splitmix64(config.seed).
TrainResult train(const std::vector<TextRecord>& records,
                  const Vocabulary& vocab, const TrainConfig& config,
                  std::size_t feature_dim = kDefaultFeatureDim,
                  std::size_t hidden_dim = kDefaultHiddenDim);

}  // namespace aigdetect
