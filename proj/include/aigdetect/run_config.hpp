#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aigdetect/auc_opt.hpp"
#include "aigdetect/common.hpp"
#include "aigdetect/features.hpp"
#include "aigdetect/rewrite_gen.hpp"

namespace aigdetect {

/// Experiment configuration. Every field has a default; the train section
/// defaults reproduce the reference recipe (lr 0.02, batch 32, sampling
/// rate 0.5, one epoch).
struct RunConfig {
  struct Corpus {
    std::string train;
    std::string validation;
    std::string test;
  } corpus;

  struct Features {
    std::size_t dim = kDefaultFeatureDim;
    std::string vocab;
  } features;

  TrainConfig train;

  struct Eval {
    std::string families;  // path to a {"model": "family"} JSON map
  } eval;

  struct Stats {
    std::string metric = "entropy";
    std::optional<double> bandwidth;
  } stats;

  struct Gen {
    std::vector<std::string> models;
    RipQuota quota;
    std::uint64_t seed = 0;
    std::string provider = "mock";
    std::size_t concurrency = 1;
    bool shared_sources = true;  // every model rewrites every essay
  } gen;
};

/// Parses a sectioned key = value config file (# comments, quoted strings,
/// numbers, booleans, string arrays). Unknown sections or keys are
/// rejected, with the offending line reported.
RunConfig parse_run_config(const std::filesystem::path& path);
RunConfig parse_run_config_text(std::string_view text,
                                const std::string& source_name);

}  // namespace aigdetect
