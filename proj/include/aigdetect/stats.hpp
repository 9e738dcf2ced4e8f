#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aigdetect/common.hpp"
#include "aigdetect/corpus.hpp"
#include "aigdetect/features.hpp"

namespace aigdetect {

struct DensityCurve {
  std::vector<double> grid;     // strictly increasing
  std::vector<double> density;  // same length, nonnegative
  double bandwidth = 0.0;
};

struct EcdfCurve {
  /// (value, cumulative fraction) at each distinct value; fractions are
  /// nondecreasing and end at exactly 1.
  std::vector<std::pair<double, double>> points;
};

inline constexpr std::size_t kDefaultKdeGridSize = 512;

/// Gaussian kernel density estimate sampled on a uniform grid spanning
/// [min - 5*bw, max + 5*bw]. Default bandwidth is Silverman's rule
/// 0.9 * min(sd, IQR/1.34) * n^(-1/5); when the IQR is zero the sd alone is
/// used, and a zero-variance sample without an explicit bandwidth is an
/// error.
DensityCurve kde(std::span<const double> values,
                 std::optional<double> bandwidth = std::nullopt,
                 std::size_t grid_size = kDefaultKdeGridSize);

EcdfCurve ecdf(std::span<const double> values);

enum class Metric { entropy, oov_ratio };

Metric metric_from_string(std::string_view s);
std::string to_string(Metric metric);

/// Per-family metric values plus the matching curve: KDE for entropy, ECDF
/// for the OOV ratio. Human records group under the pseudo-family "human".
/// Families with fewer than 2 usable texts (or a degenerate KDE bandwidth)
/// carry raw values only.
struct FamilyGroup {
  std::string family;
  std::vector<double> values;
  std::optional<DensityCurve> density;
  std::optional<EcdfCurve> cumulative;
  std::size_t skipped = 0;  // texts without tokens (no OOV ratio defined)
};

std::vector<FamilyGroup> family_report(const std::vector<TextRecord>& records,
                                       const Vocabulary& vocab, Metric metric,
                                       std::optional<double> bandwidth =
                                           std::nullopt);

/// Two-column (x, y) CSV of a curve: grid/density for KDE, value/fraction
/// for ECDF.
std::string curve_to_csv(const DensityCurve& curve);
std::string curve_to_csv(const EcdfCurve& curve);

/// JSON manifest for a family report: metric, per-family sample sizes and
/// bandwidths.
std::string report_manifest_to_json(const std::vector<FamilyGroup>& groups,
                                    Metric metric);

}  // namespace aigdetect
