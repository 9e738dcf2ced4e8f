#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "aigdetect/common.hpp"
#include "aigdetect/corpus.hpp"

namespace aigdetect {

/// Generation parameters sampled per request; both lie in [0.4, 1.0].
struct GenParams {
  double temperature = 0.7;
  double top_p = 0.7;
};

inline constexpr double kGenParamLo = 0.4;
inline constexpr double kGenParamHi = 1.0;

/// Temperature and top_p drawn independently, each uniform on [0.4, 1.0].
GenParams sample_gen_params(std::mt19937_64& rng);

/// The frozen rewrite-attack prompt. Byte-exact external contract.
std::string build_rewrite_prompt(std::string_view essay);

struct ProviderRequest {
  std::string model;
  std::string prompt;
  GenParams params;
};

struct ProviderResponse {
  std::string text;
  double latency_ms = 0.0;
  std::string raw_id;
};

/// Raised by providers; transient failures are retried, permanent ones are
/// not.
class ProviderError : public Error {
 public:
  ProviderError(std::string message, bool transient)
      : Error(Errc::provider_failure, std::move(message)),
        transient_(transient) {}
  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

/// Synchronous text-generation backend. Concrete network clients plug in
/// behind this interface; the bundled mock keeps everything offline.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual ProviderResponse generate(const ProviderRequest& request) = 0;
};

/// Deterministic offline provider. By default it emits a marked rewrite of
/// the essay body; a fixed response or a scripted failure sequence can be
/// configured for tests.
class MockProvider : public Provider {
 public:
  MockProvider() = default;
  explicit MockProvider(std::string fixed_response)
      : fixed_response_(std::move(fixed_response)) {}

  /// The next `count` calls raise transient failures before responding.
  void fail_next(std::size_t count) { failures_remaining_ = count; }
  std::size_t calls() const { return calls_; }

  ProviderResponse generate(const ProviderRequest& request) override;

 private:
  std::string fixed_response_;
  std::size_t failures_remaining_ = 0;
  std::size_t calls_ = 0;
};

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds base_delay{1000};  // doubles per retry
  std::function<void(std::chrono::milliseconds)> sleep = {};
};

struct RewriteResult {
  TextRecord record;
  std::vector<std::string> retry_log;  // one entry per retried failure
};

/// Rewrites one essay through the provider. The produced record is labeled
/// aig with domain "rip" and id "<source_id>#<model>" (assembly groups
/// splits by that source id, so source ids must not contain '#').
RewriteResult rewrite_essay(Provider& provider, const std::string& model,
                            const std::string& family,
                            const std::string& source_id,
                            const std::string& essay, GenParams params,
                            const RetryPolicy& retry = {});

struct RipQuota {
  std::size_t train_human = 9000;
  std::size_t train_per_llm = 1000;
  std::size_t test_human = 1000;
  std::size_t test_per_llm = 125;
};

struct RipSplits {
  std::vector<TextRecord> train;
  std::vector<TextRecord> test;
};

/// Selects records to meet the quota exactly, deterministically given the
/// seed. Records are grouped by source essay id and a whole group lands in
/// one split, so no source essay ever straddles train and test.
RipSplits assemble_rip(
    const std::vector<TextRecord>& human,
    const std::map<std::string, std::vector<TextRecord>>& rewritten,
    const RipQuota& quota, std::uint64_t seed);

/// Source-essay key: everything before the first '#' of a record id.
std::string_view source_essay_id(const TextRecord& record);

}  // namespace aigdetect
