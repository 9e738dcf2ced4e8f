#include "aigdetect/scorer.hpp"

#include <cmath>

#include "json.hpp"

namespace aigdetect {

namespace {
using nlohmann::json;
using nlohmann::ordered_json;

void check_dim(const ScorerParams& params, const FeatureVector& fv) {
  if (fv.dim() != params.d) {
    fail(Errc::dimension_mismatch,
         "scorer: feature dimension " + std::to_string(fv.dim()) +
             " does not match checkpoint dimension " +
             std::to_string(params.d));
  }
}
}  // namespace

ScorerParams init_scorer(std::size_t d, std::size_t h, std::uint64_t seed) {
  if (d < 1 || h < 1) {
    fail(Errc::invalid_argument, "scorer: dimensions must be >= 1");
  }
  ScorerParams p;
  p.d = d;
  p.h = h;
  p.seed = seed;
  p.flat.assign(p.param_count(), 0.0);
  std::mt19937_64 rng(seed);
  const double w1_bound = 1.0 / std::sqrt(static_cast<double>(d));
  const double w2_bound = 1.0 / std::sqrt(static_cast<double>(h));
  for (std::size_t i = 0; i < h * d; ++i) {
    p.flat[i] = uniform_real(rng, -w1_bound, w1_bound);
  }
  for (std::size_t i = 0; i < h; ++i) {
    p.w2(i) = uniform_real(rng, -w2_bound, w2_bound);
  }
  return p;
}

double score(const ScorerParams& params, const FeatureVector& fv) {
  check_dim(params, fv);
  double s = params.b2();
  for (std::size_t i = 0; i < params.h; ++i) {
    double z = params.b1(i);
    const double* row = params.flat.data() + i * params.d;
    for (std::size_t j = 0; j < params.d; ++j) z += row[j] * fv.values[j];
    if (z > 0.0) s += params.w2(i) * z;
  }
  if (!std::isfinite(s)) {
    fail(Errc::non_finite, "scorer: non-finite score");
  }
  return s;
}

std::vector<double> score_batch(const ScorerParams& params,
                                std::span<const FeatureVector> features) {
  std::vector<double> scores;
  scores.reserve(features.size());
  for (const FeatureVector& fv : features) scores.push_back(score(params, fv));
  return scores;
}

std::vector<double> score_backprop(const ScorerParams& params,
                                   std::span<const FeatureVector> features,
                                   std::span<const double> dscore) {
  if (features.size() != dscore.size()) {
    fail(Errc::dimension_mismatch,
         "scorer: dscore length does not match batch size");
  }
  std::vector<double> grad(params.param_count(), 0.0);
  std::vector<double> z(params.h);
  for (std::size_t n = 0; n < features.size(); ++n) {
    const FeatureVector& fv = features[n];
    check_dim(params, fv);
    const double g = dscore[n];
    if (g == 0.0) continue;
    for (std::size_t i = 0; i < params.h; ++i) {
      double zi = params.b1(i);
      const double* row = params.flat.data() + i * params.d;
      for (std::size_t j = 0; j < params.d; ++j) zi += row[j] * fv.values[j];
      z[i] = zi;
    }
    // dL/db2 += g; dL/dW2_i += g*relu(z_i); active units propagate to W1/b1.
    grad[params.h * params.d + 2 * params.h] += g;
    for (std::size_t i = 0; i < params.h; ++i) {
      if (z[i] <= 0.0) continue;
      grad[params.h * params.d + params.h + i] += g * z[i];
      const double gz = g * params.w2(i);
      grad[params.h * params.d + i] += gz;
      double* grow = grad.data() + i * params.d;
      for (std::size_t j = 0; j < params.d; ++j) {
        grow[j] += gz * fv.values[j];
      }
    }
  }
  return grad;
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double predict_prob(const ScorerParams& params, const FeatureVector& fv) {
  constexpr double tiny = 1e-12;
  double p = sigmoid(score(params, fv));
  if (p < tiny) p = tiny;
  if (p > 1.0 - tiny) p = 1.0 - tiny;
  return p;
}

void save_scorer(const ScorerParams& params,
                 const std::filesystem::path& path) {
  auto encode = [&](std::size_t offset, std::size_t count) {
    std::span<const double> view(params.flat.data() + offset, count);
    auto bytes = doubles_to_le_bytes(view);
    return base64_encode(bytes);
  };
  ordered_json j;
  j["magic"] = std::string(kCheckpointMagic);
  j["version"] = params.version;
  j["d"] = params.d;
  j["h"] = params.h;
  j["seed"] = params.seed;
  j["W1"] = encode(0, params.h * params.d);
  j["b1"] = encode(params.h * params.d, params.h);
  j["W2"] = encode(params.h * params.d + params.h, params.h);
  j["b2"] = encode(params.h * params.d + 2 * params.h, 1);
  write_file(path, j.dump(2) + "\n");
}

ScorerParams load_scorer(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  json j = json::parse(content, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(Errc::corrupt_checkpoint,
         "scorer: '" + path.string() + "' is not a checkpoint");
  }
  if (!j.contains("magic") || !j["magic"].is_string() ||
      j["magic"].get<std::string>() != kCheckpointMagic) {
    fail(Errc::corrupt_checkpoint,
         "scorer: missing or wrong magic in '" + path.string() + "'");
  }
  if (!j.contains("version") || !j["version"].is_number_integer()) {
    fail(Errc::corrupt_checkpoint, "scorer: missing checkpoint version");
  }
  const int version = j["version"].get<int>();
  if (version != kCheckpointVersion) {
    fail(Errc::version_mismatch,
         "scorer: checkpoint version " + std::to_string(version) +
             ", expected " + std::to_string(kCheckpointVersion));
  }
  for (const char* key : {"d", "h", "seed", "W1", "b1", "W2", "b2"}) {
    if (!j.contains(key)) {
      fail(Errc::corrupt_checkpoint,
           std::string("scorer: checkpoint missing field '") + key + "'");
    }
  }
  ScorerParams p;
  p.version = version;
  p.d = j["d"].get<std::size_t>();
  p.h = j["h"].get<std::size_t>();
  p.seed = j["seed"].get<std::uint64_t>();
  if (p.d < 1 || p.h < 1) {
    fail(Errc::shape_mismatch, "scorer: invalid checkpoint dimensions");
  }
  auto decode = [&](const char* key, std::size_t expected) {
    if (!j[key].is_string()) {
      fail(Errc::corrupt_checkpoint,
           std::string("scorer: field '") + key + "' is not a string");
    }
    auto bytes = base64_decode(j[key].get<std::string>());
    auto values = doubles_from_le_bytes(bytes);
    if (values.size() != expected) {
      fail(Errc::shape_mismatch,
           std::string("scorer: field '") + key + "' holds " +
               std::to_string(values.size()) + " values, expected " +
               std::to_string(expected));
    }
    return values;
  };
  auto w1 = decode("W1", p.h * p.d);
  auto b1 = decode("b1", p.h);
  auto w2 = decode("W2", p.h);
  auto b2 = decode("b2", 1);
  p.flat.reserve(p.param_count());
  p.flat.insert(p.flat.end(), w1.begin(), w1.end());
  p.flat.insert(p.flat.end(), b1.begin(), b1.end());
  p.flat.insert(p.flat.end(), w2.begin(), w2.end());
  p.flat.insert(p.flat.end(), b2.begin(), b2.end());
  for (double v : p.flat) {
    if (!std::isfinite(v)) {
      fail(Errc::corrupt_checkpoint,
           "scorer: non-finite parameter in checkpoint");
    }
  }
  return p;
}

}  // namespace aigdetect
