#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aigdetect {

// ---------------------------------------------------------------------------
// errors
// ---------------------------------------------------------------------------

enum class Errc {
  invalid_argument,
  io_failure,
  malformed_record,
  duplicate_id,
  label_inconsistency,
  vocab_format,
  dimension_mismatch,
  version_mismatch,
  shape_mismatch,
  corrupt_checkpoint,
  single_class,
  empty_input,
  non_finite,
  unknown_family,
  missing_pairs,
  degenerate_bandwidth,
  provider_failure,
  insufficient_supply,
  config_error,
};

/// Library-wide error type. Messages are prefixed with the module that
/// raised them ("corpus: duplicate id 'x7' (line 14)").
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

// ---------------------------------------------------------------------------
// hashing
// ---------------------------------------------------------------------------

/// FNV-1a, 64 bit. The seed is xor-folded into the offset basis so feature
/// hashing stays stable across runs and platforms.
inline std::uint64_t fnv1a64(std::span<const char> bytes,
                             std::uint64_t seed = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0) {
  return fnv1a64(std::span<const char>(s.data(), s.size()), seed);
}

std::string sha256_hex(std::string_view bytes);

// ---------------------------------------------------------------------------
// deterministic random helpers
//
// std::mt19937_64 output is pinned by the standard; the std distribution
// adapters are not, so every mapping from raw engine output to a value is
// spelled out here.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1), 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

/// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) fail(Errc::invalid_argument, "common: uniform_below(0)");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

template <class T>
void shuffle_deterministic(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

/// Standard normal draw via Box-Muller (two uniforms per call, spare
/// discarded so the draw count per call is fixed).
double gaussian(std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// base64 (checkpoint payloads)
// ---------------------------------------------------------------------------

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Little-endian 64-bit float serialization, independent of host byte order.
std::vector<std::uint8_t> doubles_to_le_bytes(std::span<const double> values);
std::vector<double> doubles_from_le_bytes(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// text / io helpers
// ---------------------------------------------------------------------------

std::string_view trim_view(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal form ("%.17g") for deterministic text output.
std::string fmt_double(double v);
/// Fixed-point form with the given decimal count.
std::string fmt_fixed(double v, int decimals);

}  // namespace aigdetect
