#include "aigdetect/rewrite_gen.hpp"

#include <algorithm>
#include <thread>

namespace aigdetect {

GenParams sample_gen_params(std::mt19937_64& rng) {
  GenParams p;
  p.temperature = uniform_real(rng, kGenParamLo, kGenParamHi);
  p.top_p = uniform_real(rng, kGenParamLo, kGenParamHi);
  return p;
}

std::string build_rewrite_prompt(std::string_view essay) {
  if (essay.empty()) {
    fail(Errc::empty_input, "rewrite_gen: cannot prompt for an empty essay");
  }
  std::string prompt =
      "Please rewrite the essay and imitate its word using habits:\n\n";
  prompt += essay;
  prompt += "\n\nTry to be different from the original essay.\n\nRevised Essay:\n";
  return prompt;
}

ProviderResponse MockProvider::generate(const ProviderRequest& request) {
  ++calls_;
  if (failures_remaining_ > 0) {
    --failures_remaining_;
    throw ProviderError("rewrite_gen: mock transient failure", true);
  }
  ProviderResponse r;
  r.raw_id = "mock-" + std::to_string(calls_);
  if (!fixed_response_.empty()) {
    r.text = fixed_response_;
    return r;
  }
  // Deterministic stand-in rewrite: the essay body of the prompt, reversed
  // word by word, under a model banner.
  const std::string_view prompt = request.prompt;
  const std::string_view head =
      "Please rewrite the essay and imitate its word using habits:\n\n";
  const std::string_view tail =
      "\n\nTry to be different from the original essay.\n\nRevised Essay:\n";
  std::string_view essay = prompt;
  if (essay.size() > head.size() + tail.size() &&
      essay.substr(0, head.size()) == head) {
    essay = essay.substr(head.size(), essay.size() - head.size() - tail.size());
  }
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < essay.size()) {
    while (i < essay.size() && essay[i] == ' ') ++i;
    std::size_t j = i;
    while (j < essay.size() && essay[j] != ' ') ++j;
    if (j > i) words.push_back(essay.substr(i, j - i));
    i = j;
  }
  r.text = "As " + request.model + " would put it:";
  for (auto it = words.rbegin(); it != words.rend(); ++it) {
    r.text += ' ';
    r.text += *it;
  }
  return r;
}

RewriteResult rewrite_essay(Provider& provider, const std::string& model,
                            const std::string& family,
                            const std::string& source_id,
                            const std::string& essay, GenParams params,
                            const RetryPolicy& retry) {
  if (essay.empty()) {
    fail(Errc::empty_input, "rewrite_gen: empty essay");
  }
  if (source_id.empty() || source_id.find('#') != std::string::npos) {
    fail(Errc::invalid_argument,
         "rewrite_gen: source id must be non-empty and free of '#'");
  }
  if (retry.max_attempts < 1) {
    fail(Errc::invalid_argument, "rewrite_gen: retry limit must be >= 1");
  }
  ProviderRequest request{model, build_rewrite_prompt(essay), params};
  RewriteResult result;
  auto delay = retry.base_delay;
  for (std::size_t attempt = 1;; ++attempt) {
    try {
      ProviderResponse response = provider.generate(request);
      if (response.text.empty()) {
        fail(Errc::provider_failure,
             "rewrite_gen: provider returned empty text for model '" + model +
                 "'");
      }
      result.record.id = source_id + "#" + model;
      result.record.text = std::move(response.text);
      result.record.label = Label::aig;
      result.record.generator_model = model;
      result.record.generator_family = family;
      result.record.domain = "rip";
      result.record.split = Split::train;  // assembly assigns the real split
      return result;
    } catch (const ProviderError& e) {
      if (!e.transient() || attempt >= retry.max_attempts) {
        fail(Errc::provider_failure,
             "rewrite_gen: provider failed after " + std::to_string(attempt) +
                 " attempts: " + e.what());
      }
      result.retry_log.emplace_back(e.what());
      if (retry.sleep) {
        retry.sleep(delay);
      } else if (delay.count() > 0) {
        std::this_thread::sleep_for(delay);
      }
      delay *= 2;
    }
  }
}

std::string_view source_essay_id(const TextRecord& record) {
  std::string_view id = record.id;
  const auto hash = id.find('#');
  return hash == std::string_view::npos ? id : id.substr(0, hash);
}

namespace {

struct SourceGroup {
  const TextRecord* human = nullptr;
  std::map<std::string, std::vector<const TextRecord*>> rewrites;
};

struct QuotaLeft {
  std::size_t human;
  std::map<std::string, std::size_t> per_model;

  bool wants(const SourceGroup& g) const {
    if (g.human && human > 0) return true;
    for (const auto& [model, recs] : g.rewrites) {
      auto it = per_model.find(model);
      if (it != per_model.end() && it->second > 0 && !recs.empty()) {
        return true;
      }
    }
    return false;
  }

  /// Moves what the quota still accepts from the group into `out`; the
  /// group's remaining records are dropped (never handed to the other
  /// split).
  void consume(const SourceGroup& g, std::vector<TextRecord>& out) {
    if (g.human && human > 0) {
      out.push_back(*g.human);
      --human;
    }
    for (const auto& [model, recs] : g.rewrites) {
      auto it = per_model.find(model);
      if (it == per_model.end()) continue;
      for (const TextRecord* r : recs) {
        if (it->second == 0) break;
        out.push_back(*r);
        --it->second;
      }
    }
  }

  bool satisfied() const {
    if (human > 0) return false;
    for (const auto& [model, left] : per_model) {
      if (left > 0) return false;
    }
    return true;
  }
};

void report_shortfall(const char* split_name, const QuotaLeft& left) {
  std::string msg = "rewrite_gen: insufficient supply for the ";
  msg += split_name;
  msg += " split:";
  if (left.human > 0) {
    msg += " human essays short by " + std::to_string(left.human) + ";";
  }
  for (const auto& [model, count] : left.per_model) {
    if (count > 0) {
      msg += " rewrites for model '" + model + "' short by " +
             std::to_string(count) + ";";
    }
  }
  msg.pop_back();
  fail(Errc::insufficient_supply, msg);
}

}  // namespace

RipSplits assemble_rip(
    const std::vector<TextRecord>& human,
    const std::map<std::string, std::vector<TextRecord>>& rewritten,
    const RipQuota& quota, std::uint64_t seed) {
  // Group everything by source essay id.
  std::map<std::string, SourceGroup> groups;
  for (const TextRecord& r : human) {
    if (r.label != Label::human) {
      fail(Errc::invalid_argument,
           "rewrite_gen: non-human record '" + r.id + "' in human supply");
    }
    SourceGroup& g = groups[std::string(source_essay_id(r))];
    if (g.human) {
      fail(Errc::duplicate_id,
           "rewrite_gen: duplicate human source '" + r.id + "'");
    }
    g.human = &r;
  }
  for (const auto& [model, records] : rewritten) {
    for (const TextRecord& r : records) {
      groups[std::string(source_essay_id(r))].rewrites[model].push_back(&r);
    }
  }

  // Fail early with a per-category message when the raw supply cannot meet
  // the quota.
  {
    std::size_t human_total = human.size();
    if (human_total < quota.train_human + quota.test_human) {
      fail(Errc::insufficient_supply,
           "rewrite_gen: human essays: need " +
               std::to_string(quota.train_human + quota.test_human) +
               ", have " + std::to_string(human_total));
    }
    const std::size_t per_model_need = quota.train_per_llm + quota.test_per_llm;
    for (const auto& [model, records] : rewritten) {
      if (records.size() < per_model_need) {
        fail(Errc::insufficient_supply,
             "rewrite_gen: rewrites for model '" + model + "': need " +
                 std::to_string(per_model_need) + ", have " +
                 std::to_string(records.size()));
      }
    }
  }

  QuotaLeft test_left{quota.test_human, {}};
  QuotaLeft train_left{quota.train_human, {}};
  for (const auto& [model, records] : rewritten) {
    test_left.per_model[model] = quota.test_per_llm;
    train_left.per_model[model] = quota.train_per_llm;
  }

  std::vector<const SourceGroup*> order;
  order.reserve(groups.size());
  for (const auto& [id, g] : groups) order.push_back(&g);
  std::mt19937_64 rng(seed);
  shuffle_deterministic(order, rng);

  // Greedy fill, smaller split first. A group is committed to one split and
  // whatever the quota cannot absorb is dropped, so splits never share a
  // source essay.
  RipSplits splits;
  for (const SourceGroup* g : order) {
    if (test_left.wants(*g)) {
      test_left.consume(*g, splits.test);
    } else if (train_left.wants(*g)) {
      train_left.consume(*g, splits.train);
    }
  }
  if (!test_left.satisfied()) report_shortfall("test", test_left);
  if (!train_left.satisfied()) report_shortfall("train", train_left);

  for (TextRecord& r : splits.train) r.split = Split::train;
  for (TextRecord& r : splits.test) r.split = Split::test;
  return splits;
}

}  // namespace aigdetect
