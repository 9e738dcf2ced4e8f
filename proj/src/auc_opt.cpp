#include "aigdetect/auc_opt.hpp"

#include <algorithm>
#include <cmath>

namespace aigdetect {

void validate_train_config(const TrainConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    fail(Errc::invalid_argument, "auc_opt: learning_rate must be > 0");
  }
  if (!(config.inner_lr >= 0.0)) {
    fail(Errc::invalid_argument, "auc_opt: inner_lr must be >= 0");
  }
  if (config.batch_size < 2) {
    fail(Errc::invalid_argument, "auc_opt: batch_size must be >= 2");
  }
  if (!(config.sampling_rate > 0.0 && config.sampling_rate < 1.0)) {
    fail(Errc::invalid_argument, "auc_opt: sampling_rate must be in (0,1)");
  }
  if (config.epochs < 1) {
    fail(Errc::invalid_argument, "auc_opt: epochs must be >= 1");
  }
  if (!(config.margin > 0.0)) {
    fail(Errc::invalid_argument, "auc_opt: margin must be > 0");
  }
}

void validate_batch(const Batch& batch) {
  if (batch.features.size() != batch.labels.size()) {
    fail(Errc::invalid_argument,
         "auc_opt: batch features/labels size mismatch");
  }
  std::size_t pos = 0, neg = 0;
  for (int y : batch.labels) {
    if (y == 1) {
      ++pos;
    } else if (y == 0) {
      ++neg;
    } else {
      fail(Errc::invalid_argument, "auc_opt: labels must be 0 or 1");
    }
  }
  if (pos == 0 || neg == 0) {
    fail(Errc::single_class,
         "auc_opt: batch needs at least one positive and one negative");
  }
}

std::size_t positives_per_batch(double sampling_rate,
                                std::size_t batch_size) {
  const double x = sampling_rate * static_cast<double>(batch_size);
  const double f = std::floor(x);
  const double frac = x - f;
  double r;
  if (frac > 0.5) {
    r = f + 1.0;
  } else if (frac < 0.5) {
    r = f;
  } else {
    r = std::fmod(f, 2.0) == 0.0 ? f : f + 1.0;  // half to even
  }
  return static_cast<std::size_t>(r);
}

DualSampler::DualSampler(const std::vector<int>& labels,
                         std::size_t batch_size, double sampling_rate,
                         std::uint64_t seed)
    : rng_(seed) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      pos_order_.push_back(i);
    } else if (labels[i] == 0) {
      neg_order_.push_back(i);
    } else {
      fail(Errc::invalid_argument, "auc_opt: labels must be 0 or 1");
    }
  }
  if (pos_order_.empty() || neg_order_.empty()) {
    fail(Errc::single_class,
         "auc_opt: training set must contain both classes");
  }
  n_pos_per_batch_ = positives_per_batch(sampling_rate, batch_size);
  if (n_pos_per_batch_ == 0 || n_pos_per_batch_ >= batch_size) {
    fail(Errc::invalid_argument,
         "auc_opt: sampling_rate * batch_size rounds to an empty class");
  }
  n_neg_per_batch_ = batch_size - n_pos_per_batch_;
  shuffle_deterministic(pos_order_, rng_);
  shuffle_deterministic(neg_order_, rng_);
}

std::size_t DualSampler::take(std::vector<std::size_t>& order,
                              std::size_t& cursor) {
  if (cursor == order.size()) {
    shuffle_deterministic(order, rng_);
    cursor = 0;
  }
  return order[cursor++];
}

std::vector<std::size_t> DualSampler::next() {
  std::vector<std::size_t> batch;
  batch.reserve(n_pos_per_batch_ + n_neg_per_batch_);
  for (std::size_t k = 0; k < n_pos_per_batch_; ++k) {
    batch.push_back(take(pos_order_, pos_cursor_));
  }
  for (std::size_t k = 0; k < n_neg_per_batch_; ++k) {
    batch.push_back(take(neg_order_, neg_cursor_));
  }
  return batch;
}

// ---------------------------------------------------------------------------
// losses
// ---------------------------------------------------------------------------

namespace {

struct ClassMeans {
  double mean_pos = 0.0;
  double mean_neg = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

ClassMeans class_means(std::span<const double> scores,
                       std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    fail(Errc::invalid_argument, "auc_opt: scores/labels size mismatch");
  }
  ClassMeans m;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      fail(Errc::non_finite, "auc_opt: non-finite score in batch");
    }
    if (labels[i] == 1) {
      m.mean_pos += scores[i];
      ++m.n_pos;
    } else if (labels[i] == 0) {
      m.mean_neg += scores[i];
      ++m.n_neg;
    } else {
      fail(Errc::invalid_argument, "auc_opt: labels must be 0 or 1");
    }
  }
  if (m.n_pos == 0 || m.n_neg == 0) {
    fail(Errc::single_class,
         "auc_opt: loss undefined for a single-class batch");
  }
  m.mean_pos /= static_cast<double>(m.n_pos);
  m.mean_neg /= static_cast<double>(m.n_neg);
  return m;
}

void check_state(const AUCMState& state) {
  if (!(state.margin > 0.0)) {
    fail(Errc::invalid_argument, "auc_opt: margin must be > 0");
  }
  if (!(state.alpha_dual >= 0.0)) {
    fail(Errc::invalid_argument, "auc_opt: alpha_dual must be >= 0");
  }
}

double clamped_sigmoid(double s) {
  constexpr double tiny = 1e-12;
  double p = sigmoid(s);
  if (p < tiny) p = tiny;
  if (p > 1.0 - tiny) p = 1.0 - tiny;
  return p;
}

}  // namespace

double aucm_loss(std::span<const double> scores, std::span<const int> labels,
                 const AUCMState& state) {
  check_state(state);
  const ClassMeans m = class_means(scores, labels);
  double sq_pos = 0.0, sq_neg = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 1) {
      sq_pos += (scores[i] - state.a) * (scores[i] - state.a);
    } else {
      sq_neg += (scores[i] - state.b) * (scores[i] - state.b);
    }
  }
  sq_pos /= static_cast<double>(m.n_pos);
  sq_neg /= static_cast<double>(m.n_neg);
  return sq_pos + sq_neg +
         2.0 * state.alpha_dual * (state.margin - m.mean_pos + m.mean_neg) -
         state.alpha_dual * state.alpha_dual;
}

AucmGrad aucm_grad(std::span<const double> scores,
                   std::span<const int> labels, const AUCMState& state) {
  check_state(state);
  const ClassMeans m = class_means(scores, labels);
  AucmGrad g;
  g.dscores.resize(scores.size());
  const double inv_pos = 1.0 / static_cast<double>(m.n_pos);
  const double inv_neg = 1.0 / static_cast<double>(m.n_neg);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 1) {
      g.dscores[i] =
          2.0 * (scores[i] - state.a) * inv_pos - 2.0 * state.alpha_dual * inv_pos;
    } else {
      g.dscores[i] =
          2.0 * (scores[i] - state.b) * inv_neg + 2.0 * state.alpha_dual * inv_neg;
    }
  }
  g.da = 2.0 * (state.a - m.mean_pos);
  g.db = 2.0 * (state.b - m.mean_neg);
  g.dalpha = 2.0 * (state.margin - m.mean_pos + m.mean_neg) -
             2.0 * state.alpha_dual;
  g.loss = aucm_loss(scores, labels, state);
  return g;
}

double ce_loss(std::span<const double> scores, std::span<const int> labels) {
  if (scores.empty() || scores.size() != labels.size()) {
    fail(Errc::invalid_argument, "auc_opt: scores/labels size mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double p = clamped_sigmoid(scores[i]);
    total -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return total / static_cast<double>(scores.size());
}

std::vector<double> ce_score_grad(std::span<const double> scores,
                                  std::span<const int> labels) {
  if (scores.empty() || scores.size() != labels.size()) {
    fail(Errc::invalid_argument, "auc_opt: scores/labels size mismatch");
  }
  std::vector<double> g(scores.size());
  const double inv = 1.0 / static_cast<double>(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    g[i] = (clamped_sigmoid(scores[i]) - static_cast<double>(labels[i])) * inv;
  }
  return g;
}

std::vector<double> ce_param_grad(const ScorerParams& params,
                                  const Batch& batch) {
  validate_batch(batch);
  const std::vector<double> scores = score_batch(params, batch.features);
  const std::vector<double> ds = ce_score_grad(scores, batch.labels);
  return score_backprop(params, batch.features, ds);
}

namespace {

ScorerParams inner_step(const ScorerParams& params, double inner_lr,
                        std::span<const double> inner_grad) {
  if (inner_grad.size() != params.param_count()) {
    fail(Errc::dimension_mismatch,
         "auc_opt: inner gradient size does not match parameter count");
  }
  ScorerParams shifted = params;
  for (std::size_t k = 0; k < shifted.flat.size(); ++k) {
    shifted.flat[k] -= inner_lr * inner_grad[k];
  }
  return shifted;
}

}  // namespace

double compositional_loss_at(const ScorerParams& params, const Batch& batch,
                             const AUCMState& state, double inner_lr,
                             std::span<const double> frozen_inner_grad) {
  validate_batch(batch);
  if (inner_lr < 0.0) {
    fail(Errc::invalid_argument, "auc_opt: inner_lr must be >= 0");
  }
  const ScorerParams shifted = inner_step(params, inner_lr, frozen_inner_grad);
  const std::vector<double> scores = score_batch(shifted, batch.features);
  return aucm_loss(scores, batch.labels, state);
}

double compositional_loss(const ScorerParams& params, const Batch& batch,
                          const AUCMState& state, double inner_lr) {
  const std::vector<double> inner = ce_param_grad(params, batch);
  return compositional_loss_at(params, batch, state, inner_lr, inner);
}

CompositionalGrad compositional_grad(const ScorerParams& params,
                                     const Batch& batch,
                                     const AUCMState& state, double inner_lr) {
  validate_batch(batch);
  if (inner_lr < 0.0) {
    fail(Errc::invalid_argument, "auc_opt: inner_lr must be >= 0");
  }
  const std::vector<double> inner = ce_param_grad(params, batch);
  const ScorerParams shifted = inner_step(params, inner_lr, inner);
  const std::vector<double> scores = score_batch(shifted, batch.features);
  const AucmGrad ag = aucm_grad(scores, batch.labels, state);
  CompositionalGrad g;
  // The inner step is a constant shift w.r.t. the outer differentiation, so
  // d loss/d w equals the network gradient taken at the shifted parameters.
  g.dparams = score_backprop(shifted, batch.features, ag.dscores);
  g.da = ag.da;
  g.db = ag.db;
  g.dalpha = ag.dalpha;
  g.loss = ag.loss;
  return g;
}

// ---------------------------------------------------------------------------
// optimizer
// ---------------------------------------------------------------------------

StepResult pdsca_step(const ScorerParams& params, const AUCMState& state,
                      const Batch& batch, const TrainConfig& config) {
  // A zero learning rate is a valid degenerate step (no-op update), so only
  // the pieces this step consumes are checked here; train() enforces the
  // full config contract.
  if (!(config.learning_rate >= 0.0)) {
    fail(Errc::invalid_argument, "auc_opt: learning_rate must be >= 0");
  }
  if (!(config.inner_lr >= 0.0)) {
    fail(Errc::invalid_argument, "auc_opt: inner_lr must be >= 0");
  }
  const CompositionalGrad g =
      compositional_grad(params, batch, state, config.inner_lr);
  for (std::size_t k = 0; k < g.dparams.size(); ++k) {
    if (!std::isfinite(g.dparams[k])) {
      fail(Errc::non_finite,
           "auc_opt: non-finite gradient w.r.t. parameter " +
               std::to_string(k));
    }
  }
  if (!std::isfinite(g.da)) {
    fail(Errc::non_finite, "auc_opt: non-finite gradient w.r.t. a");
  }
  if (!std::isfinite(g.db)) {
    fail(Errc::non_finite, "auc_opt: non-finite gradient w.r.t. b");
  }
  if (!std::isfinite(g.dalpha)) {
    fail(Errc::non_finite, "auc_opt: non-finite gradient w.r.t. alpha_dual");
  }
  StepResult result{params, state, g.loss};
  const double lr = config.learning_rate;
  for (std::size_t k = 0; k < result.params.flat.size(); ++k) {
    result.params.flat[k] -= lr * g.dparams[k];
  }
  result.state.a -= lr * g.da;
  result.state.b -= lr * g.db;
  result.state.alpha_dual =
      std::max(0.0, result.state.alpha_dual + lr * g.dalpha);
  return result;
}

TrainResult train(const std::vector<TextRecord>& records,
                  const Vocabulary& vocab, const TrainConfig& config,
                  std::size_t feature_dim, std::size_t hidden_dim) {
  validate_train_config(config);
  if (records.empty()) {
    fail(Errc::empty_input, "auc_opt: no training records");
  }
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const TextRecord& r : records) {
    labels.push_back(r.label == Label::aig ? 1 : 0);
  }
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
  if (!has_pos || !has_neg) {
    fail(Errc::single_class,
         "auc_opt: training corpus must contain both classes");
  }

  std::vector<FeatureVector> features;
  features.reserve(records.size());
  for (const TextRecord& r : records) {
    features.push_back(featurize(r.text, vocab, feature_dim));
  }

  DualSampler sampler(labels, config.batch_size, config.sampling_rate,
                      splitmix64(config.seed));
  ScorerParams params = init_scorer(feature_dim, hidden_dim, config.seed);
  AUCMState state;
  state.margin = config.margin;

  const std::size_t batches_per_epoch =
      (records.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = batches_per_epoch * config.epochs;

  TrainResult result;
  result.loss_history.reserve(total_steps);
  Batch batch;
  for (std::size_t step = 0; step < total_steps; ++step) {
    const std::vector<std::size_t> indices = sampler.next();
    batch.features.clear();
    batch.labels.clear();
    for (std::size_t idx : indices) {
      batch.features.push_back(features[idx]);
      batch.labels.push_back(labels[idx]);
    }
    StepResult sr = pdsca_step(params, state, batch, config);
    params = std::move(sr.params);
    state = sr.state;
    result.loss_history.push_back(sr.loss);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace aigdetect
