#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "aigdetect/common.hpp"
#include "aigdetect/features.hpp"

namespace aigdetect {

inline constexpr std::string_view kCheckpointMagic = "AIGDETECT-CKPT-1";
inline constexpr int kCheckpointVersion = 1;
inline constexpr std::size_t kDefaultHiddenDim = 64;

/// One-hidden-layer ReLU scorer: s(x) = W2 . relu(W1 x + b1) + b2.
/// All parameters live in one contiguous buffer laid out as
/// [W1 (h*d, row-major) | b1 (h) | W2 (h) | b2], which keeps optimizer
/// updates, finite-difference probes and checkpointing uniform.
struct ScorerParams {
  std::size_t d = 0;
  std::size_t h = 0;
  std::uint64_t seed = 0;
  int version = kCheckpointVersion;
  std::vector<double> flat;

  std::size_t param_count() const { return h * d + 2 * h + 1; }

  double& w1(std::size_t i, std::size_t j) { return flat[i * d + j]; }
  double w1(std::size_t i, std::size_t j) const { return flat[i * d + j]; }
  double& b1(std::size_t i) { return flat[h * d + i]; }
  double b1(std::size_t i) const { return flat[h * d + i]; }
  double& w2(std::size_t i) { return flat[h * d + h + i]; }
  double w2(std::size_t i) const { return flat[h * d + h + i]; }
  double& b2() { return flat[h * d + 2 * h]; }
  double b2() const { return flat[h * d + 2 * h]; }

  bool operator==(const ScorerParams&) const = default;
};

/// Deterministic initialization: W1 ~ U(-1/sqrt(d), 1/sqrt(d)),
/// W2 ~ U(-1/sqrt(h), 1/sqrt(h)), biases zero.
ScorerParams init_scorer(std::size_t d, std::size_t h, std::uint64_t seed);

double score(const ScorerParams& params, const FeatureVector& fv);

std::vector<double> score_batch(const ScorerParams& params,
                                std::span<const FeatureVector> features);

/// Accumulates d(sum_i dscore[i] * s(x_i))/d(params) in flat layout.
std::vector<double> score_backprop(const ScorerParams& params,
                                   std::span<const FeatureVector> features,
                                   std::span<const double> dscore);

double sigmoid(double x);

/// sigmoid(score), clamped to stay strictly inside (0,1) so cross-entropy
/// terms remain finite.
double predict_prob(const ScorerParams& params, const FeatureVector& fv);

void save_scorer(const ScorerParams& params,
                 const std::filesystem::path& path);
ScorerParams load_scorer(const std::filesystem::path& path);

}  // namespace aigdetect
