#include "aigdetect/stats.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace aigdetect {

namespace {

double sample_sd(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

// Linear-interpolation quantile of a sorted sample (the common "type 7").
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double silverman_bandwidth(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = sample_sd(values);
  const double iqr =
      quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) {
    fail(Errc::degenerate_bandwidth,
         "stats: zero-variance sample needs an explicit bandwidth");
  }
  return 0.9 * spread *
         std::pow(static_cast<double>(values.size()), -0.2);
}

}  // namespace

DensityCurve kde(std::span<const double> values,
                 std::optional<double> bandwidth, std::size_t grid_size) {
  if (values.size() < 2) {
    fail(Errc::invalid_argument, "stats: KDE needs at least 2 values");
  }
  if (grid_size < 2) {
    fail(Errc::invalid_argument, "stats: KDE grid needs at least 2 points");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      fail(Errc::non_finite, "stats: non-finite value in KDE input");
    }
  }
  if (bandwidth && !(*bandwidth > 0.0)) {
    fail(Errc::invalid_argument, "stats: bandwidth must be > 0");
  }
  DensityCurve curve;
  curve.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(values);

  const auto [min_it, max_it] = std::minmax_element(values.begin(),
                                                    values.end());
  const double lo = *min_it - 5.0 * curve.bandwidth;
  const double hi = *max_it + 5.0 * curve.bandwidth;
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);

  curve.grid.resize(grid_size);
  curve.density.resize(grid_size);
  const double norm =
      1.0 / (static_cast<double>(values.size()) * curve.bandwidth *
             std::sqrt(2.0 * M_PI));
  for (std::size_t g = 0; g < grid_size; ++g) {
    const double x = lo + step * static_cast<double>(g);
    double acc = 0.0;
    for (double v : values) {
      const double t = (x - v) / curve.bandwidth;
      acc += std::exp(-0.5 * t * t);
    }
    curve.grid[g] = x;
    curve.density[g] = norm * acc;
  }
  return curve;
}

EcdfCurve ecdf(std::span<const double> values) {
  if (values.empty()) {
    fail(Errc::empty_input, "stats: ECDF of an empty sample");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      fail(Errc::non_finite, "stats: non-finite value in ECDF input");
    }
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  EcdfCurve curve;
  const double n = static_cast<double>(sorted.size());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    curve.points.emplace_back(sorted[i], static_cast<double>(j) / n);
    i = j;
  }
  curve.points.back().second = 1.0;
  return curve;
}

Metric metric_from_string(std::string_view s) {
  if (s == "entropy") return Metric::entropy;
  if (s == "oov_ratio") return Metric::oov_ratio;
  fail(Errc::invalid_argument,
       "stats: unknown metric '" + std::string(s) +
           "' (expected entropy or oov_ratio)");
}

std::string to_string(Metric metric) {
  return metric == Metric::entropy ? "entropy" : "oov_ratio";
}

std::vector<FamilyGroup> family_report(const std::vector<TextRecord>& records,
                                       const Vocabulary& vocab, Metric metric,
                                       std::optional<double> bandwidth) {
  if (records.empty()) {
    fail(Errc::empty_input, "stats: no records to report on");
  }
  std::map<std::string, FamilyGroup> groups;
  for (const TextRecord& r : records) {
    const std::string family =
        r.label == Label::human ? "human" : *r.generator_family;
    FamilyGroup& g = groups.try_emplace(family).first->second;
    g.family = family;
    const TokenSeq tokens = tokenize(r.text);
    if (metric == Metric::oov_ratio && tokens.empty()) {
      ++g.skipped;
      continue;
    }
    g.values.push_back(metric == Metric::entropy
                           ? entropy(tokens, vocab)
                           : oov_ratio(tokens, vocab));
  }

  std::vector<FamilyGroup> report;
  report.reserve(groups.size());
  for (auto& [family, g] : groups) {
    if (g.values.size() >= 2) {
      if (metric == Metric::entropy) {
        try {
          g.density = kde(g.values, bandwidth);
        } catch (const Error& e) {
          if (e.code() != Errc::degenerate_bandwidth) throw;
          // all values equal: raw values only
        }
      } else {
        g.cumulative = ecdf(g.values);
      }
    }
    report.push_back(std::move(g));
  }
  return report;
}

std::string curve_to_csv(const DensityCurve& curve) {
  std::string out = "x,y\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out += fmt_double(curve.grid[i]);
    out += ',';
    out += fmt_double(curve.density[i]);
    out += '\n';
  }
  return out;
}

std::string curve_to_csv(const EcdfCurve& curve) {
  std::string out = "x,y\n";
  for (const auto& [x, y] : curve.points) {
    out += fmt_double(x);
    out += ',';
    out += fmt_double(y);
    out += '\n';
  }
  return out;
}

std::string report_manifest_to_json(const std::vector<FamilyGroup>& groups,
                                    Metric metric) {
  nlohmann::ordered_json j;
  j["metric"] = to_string(metric);
  nlohmann::ordered_json families = nlohmann::ordered_json::array();
  for (const FamilyGroup& g : groups) {
    nlohmann::ordered_json f;
    f["family"] = g.family;
    f["n_values"] = g.values.size();
    f["skipped"] = g.skipped;
    f["has_curve"] = g.density.has_value() || g.cumulative.has_value();
    if (g.density) f["bandwidth"] = g.density->bandwidth;
    families.push_back(std::move(f));
  }
  j["families"] = std::move(families);
  return j.dump(2) + "\n";
}

}  // namespace aigdetect
