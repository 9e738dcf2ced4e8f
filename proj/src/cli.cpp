#include "aigdetect/cli.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "aigdetect/auc_opt.hpp"
#include "aigdetect/common.hpp"
#include "aigdetect/corpus.hpp"
#include "aigdetect/eval.hpp"
#include "aigdetect/features.hpp"
#include "aigdetect/rewrite_gen.hpp"
#include "aigdetect/run_config.hpp"
#include "aigdetect/scorer.hpp"
#include "aigdetect/stats.hpp"

namespace aigdetect {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// reproducibility manifest
// ---------------------------------------------------------------------------

class RunManifest {
 public:
  explicit RunManifest(std::string subcommand)
      : subcommand_(std::move(subcommand)) {}

  void set_config(ordered_json config) { config_ = std::move(config); }
  void add_seed(const std::string& name, std::uint64_t value) {
    seeds_[name] = value;
  }
  void add_output(const fs::path& path) { outputs_.push_back(path); }

  void write(const fs::path& out_dir) const {
    ordered_json j;
    j["subcommand"] = subcommand_;
    j["created_at"] = iso_now();
    j["config"] = config_.is_null() ? ordered_json::object() : config_;
    j["seeds"] = seeds_;
    ordered_json outs = ordered_json::array();
    for (const fs::path& p : outputs_) {
      ordered_json o;
      o["path"] = p.filename().string();
      o["sha256"] = sha256_hex(read_file(p));
      outs.push_back(std::move(o));
    }
    j["outputs"] = std::move(outs);
    write_file(out_dir / "manifest.json", j.dump(2) + "\n");
  }

 private:
  static std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  std::string subcommand_;
  ordered_json config_;
  ordered_json seeds_ = ordered_json::object();
  std::vector<fs::path> outputs_;
};

ordered_json config_snapshot(const RunConfig& c) {
  ordered_json j;
  j["corpus"] = {{"train", c.corpus.train},
                 {"validation", c.corpus.validation},
                 {"test", c.corpus.test}};
  j["features"] = {{"dim", c.features.dim}, {"vocab", c.features.vocab}};
  j["train"] = {{"learning_rate", c.train.learning_rate},
                {"inner_lr", c.train.inner_lr},
                {"batch_size", c.train.batch_size},
                {"sampling_rate", c.train.sampling_rate},
                {"epochs", c.train.epochs},
                {"margin", c.train.margin},
                {"seed", c.train.seed}};
  j["eval"] = {{"families", c.eval.families}};
  j["stats"] = {{"metric", c.stats.metric}};
  if (c.stats.bandwidth) j["stats"]["bandwidth"] = *c.stats.bandwidth;
  j["gen"] = {{"models", c.gen.models},
              {"train_human", c.gen.quota.train_human},
              {"train_per_llm", c.gen.quota.train_per_llm},
              {"test_human", c.gen.quota.test_human},
              {"test_per_llm", c.gen.quota.test_per_llm},
              {"seed", c.gen.seed},
              {"provider", c.gen.provider},
              {"concurrency", c.gen.concurrency},
              {"shared_sources", c.gen.shared_sources}};
  return j;
}

std::map<std::string, std::string> load_families_json(const fs::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(Errc::config_error,
         "cli: families file '" + path.string() + "' is not a JSON object");
  }
  std::map<std::string, std::string> families;
  for (const auto& [model, family] : j.items()) {
    if (!family.is_string()) {
      fail(Errc::config_error,
           "cli: family of model '" + model + "' must be a string");
    }
    families[model] = family.get<std::string>();
  }
  return families;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

struct IngestOptions {
  std::string corpus;
  std::string out_dir;
};

void run_ingest(const IngestOptions& opt) {
  const LoadResult loaded = load_jsonl(opt.corpus);
  ordered_json j;
  j["source"] = opt.corpus;
  j["total"] = loaded.manifest.total();
  j["domains"] = loaded.manifest.domains;
  ordered_json counts = ordered_json::array();
  for (const auto& [key, count] : loaded.manifest.counts) {
    ordered_json c;
    c["split"] = to_string(key.split);
    c["label"] = to_string(key.label);
    if (!key.model.empty()) c["model"] = key.model;
    c["count"] = count;
    counts.push_back(std::move(c));
  }
  j["counts"] = std::move(counts);

  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  write_file(out_dir / "corpus_manifest.json", j.dump(2) + "\n");

  RunManifest manifest("ingest");
  manifest.set_config(ordered_json{{"corpus", opt.corpus}});
  manifest.add_output(out_dir / "corpus_manifest.json");
  manifest.write(out_dir);
  std::cout << "ingested " << loaded.records.size() << " records from "
            << opt.corpus << "\n";
}

struct SynthOptions {
  std::string out_dir;
  SynthConfig config;
  std::size_t test_human = 0;
  std::size_t test_aig = 0;
};

void run_synth(const SynthOptions& opt) {
  std::vector<TextRecord> records =
      generate_synthetic_corpus(opt.config, Split::train);
  if (opt.test_human > 0 || opt.test_aig > 0) {
    SynthConfig test_cfg = opt.config;
    test_cfg.n_human = std::max<std::size_t>(opt.test_human, 1);
    test_cfg.n_aig = std::max<std::size_t>(opt.test_aig, 1);
    test_cfg.seed = opt.config.seed + 1;
    std::vector<TextRecord> test_records =
        generate_synthetic_corpus(test_cfg, Split::test, "t");
    records.insert(records.end(),
                   std::make_move_iterator(test_records.begin()),
                   std::make_move_iterator(test_records.end()));
  }
  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  save_jsonl(records, out_dir / "corpus.jsonl");
  Vocabulary vocab = Vocabulary::from_pairs(
      synthetic_token_probs(opt.config.vocab_size), "synthetic");
  vocab.save_tsv(out_dir / "vocab.tsv");

  RunManifest manifest("synth");
  manifest.set_config(ordered_json{{"n_human", opt.config.n_human},
                                   {"n_aig", opt.config.n_aig},
                                   {"test_human", opt.test_human},
                                   {"test_aig", opt.test_aig},
                                   {"separability", opt.config.separability},
                                   {"vocab_size", opt.config.vocab_size}});
  manifest.add_seed("synth", opt.config.seed);
  manifest.add_output(out_dir / "corpus.jsonl");
  manifest.add_output(out_dir / "vocab.tsv");
  manifest.write(out_dir);
  std::cout << "synthesized " << records.size() << " records\n";
}

struct TrainOptions {
  std::string config_path;
  std::string corpus;
  std::string vocab;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void run_train(const TrainOptions& opt) {
  RunConfig config;
  if (!opt.config_path.empty()) config = parse_run_config(opt.config_path);
  if (opt.seed) config.train.seed = *opt.seed;
  const std::string corpus_path =
      !opt.corpus.empty() ? opt.corpus : config.corpus.train;
  const std::string vocab_path =
      !opt.vocab.empty() ? opt.vocab : config.features.vocab;
  if (corpus_path.empty()) {
    fail(Errc::config_error, "cli: no training corpus given");
  }
  if (vocab_path.empty()) {
    fail(Errc::config_error, "cli: no vocabulary given");
  }
  const LoadResult loaded = load_jsonl(corpus_path);
  std::vector<TextRecord> train_records;
  for (const TextRecord& r : loaded.records) {
    if (r.split == Split::train) train_records.push_back(r);
  }
  if (train_records.empty()) {
    fail(Errc::empty_input,
         "cli: corpus '" + corpus_path + "' has no train-split records");
  }
  const Vocabulary vocab = Vocabulary::from_tsv(vocab_path);
  const TrainResult result =
      train(train_records, vocab, config.train, config.features.dim);

  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  save_scorer(result.params, out_dir / "model.ckpt");
  std::string loss_csv = "batch_index,loss\n";
  for (std::size_t i = 0; i < result.loss_history.size(); ++i) {
    loss_csv += std::to_string(i);
    loss_csv += ',';
    loss_csv += fmt_double(result.loss_history[i]);
    loss_csv += '\n';
  }
  write_file(out_dir / "loss_history.csv", loss_csv);

  RunManifest manifest("train");
  manifest.set_config(config_snapshot(config));
  manifest.add_seed("train", config.train.seed);
  manifest.add_output(out_dir / "model.ckpt");
  manifest.add_output(out_dir / "loss_history.csv");
  manifest.write(out_dir);
  std::cout << "trained on " << train_records.size() << " records, "
            << result.loss_history.size() << " batches\n";
}

struct EvalOptions {
  std::string ckpt;
  std::string corpus;
  std::string vocab;
  std::string out_dir;
  std::string train_model;
};

void run_eval(const EvalOptions& opt) {
  const ScorerParams params = load_scorer(opt.ckpt);
  const Vocabulary vocab = Vocabulary::from_tsv(opt.vocab);
  const LoadResult loaded = load_jsonl(opt.corpus);
  std::vector<TextRecord> test_records;
  for (const TextRecord& r : loaded.records) {
    if (r.split == Split::test) test_records.push_back(r);
  }
  if (test_records.empty()) {
    fail(Errc::empty_input,
         "cli: corpus '" + opt.corpus + "' has no test-split records");
  }
  const std::vector<TestSubset> subsets = make_llm_subsets(test_records);
  if (subsets.empty()) {
    fail(Errc::empty_input, "cli: no aig records to evaluate against");
  }

  std::vector<SubsetResult> results;
  std::vector<AucScore> scores;
  for (const TestSubset& subset : subsets) {
    SubsetResult r;
    r.model = subset.model;
    for (const TextRecord& rec : subset.records) {
      if (rec.label == Label::aig) {
        r.family = *rec.generator_family;
        break;
      }
    }
    r.auc = evaluate_subset(params, subset, vocab);
    scores.push_back(r.auc);
    results.push_back(std::move(r));
  }

  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  write_file(out_dir / "results.csv", subset_results_to_csv(results));

  ordered_json summary;
  summary["n_subsets"] = results.size();
  if (results.size() >= 2) {
    const SuperSummary s = super_summary(scores);
    summary["mean_auc"] = s.mean;
    summary["sd_auc"] = s.sd;
  } else {
    summary["mean_auc"] = scores.front().value;
  }
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");

  RunManifest manifest("eval");
  manifest.set_config(ordered_json{{"ckpt", opt.ckpt},
                                   {"corpus", opt.corpus},
                                   {"vocab", opt.vocab},
                                   {"train_model", opt.train_model}});
  manifest.add_output(out_dir / "results.csv");
  manifest.add_output(out_dir / "summary.json");

  if (!opt.train_model.empty()) {
    std::string evals = "train_model,test_model,auc,n_pos,n_neg\n";
    for (const SubsetResult& r : results) {
      evals += opt.train_model;
      evals += ',';
      evals += r.model;
      evals += ',';
      evals += fmt_fixed(r.auc.value, 9);
      evals += ',';
      evals += std::to_string(r.auc.n_pos);
      evals += ',';
      evals += std::to_string(r.auc.n_neg);
      evals += '\n';
    }
    write_file(out_dir / "evals.csv", evals);
    manifest.add_output(out_dir / "evals.csv");
  }
  manifest.write(out_dir);
  for (const SubsetResult& r : results) {
    std::cout << r.model << " auc=" << fmt_fixed(r.auc.value, 3) << "\n";
  }
}

struct MatrixOptions {
  std::string evals;
  std::string families;
  std::string out_dir;
};

void run_matrix(const MatrixOptions& opt) {
  const std::map<std::string, std::string> families =
      load_families_json(opt.families);

  PairEvaluations evaluations;
  std::istringstream in(read_file(opt.evals));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    if (line.rfind("train_model,", 0) == 0) continue;  // (repeated) header
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() < 3) {
      fail(Errc::malformed_record,
           "cli: bad evals row at line " + std::to_string(line_no));
    }
    AucScore auc;
    try {
      auc.value = std::stod(fields[2]);
      auc.n_pos = fields.size() > 3 ? std::stoull(fields[3]) : 1;
      auc.n_neg = fields.size() > 4 ? std::stoull(fields[4]) : 1;
    } catch (const std::logic_error&) {
      fail(Errc::malformed_record,
           "cli: unparsable evals row at line " + std::to_string(line_no));
    }
    evaluations[{fields[0], fields[1]}] = auc;
  }

  const AucMatrix matrix = family_matrix(evaluations, families);
  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  write_file(out_dir / "matrix.csv", matrix_to_csv(matrix));
  write_file(out_dir / "matrix_counts.json", matrix_counts_to_json(matrix));

  RunManifest manifest("matrix");
  manifest.set_config(
      ordered_json{{"evals", opt.evals}, {"families", opt.families}});
  manifest.add_output(out_dir / "matrix.csv");
  manifest.add_output(out_dir / "matrix_counts.json");
  manifest.write(out_dir);
  std::cout << "matrix " << matrix.train_families.size() << "x"
            << matrix.test_families.size() << " written\n";
}

struct StatsOptions {
  std::string corpus;
  std::string vocab;
  std::string metric = "entropy";
  std::optional<double> bandwidth;
  std::string out_dir;
};

void run_stats(const StatsOptions& opt) {
  const Metric metric = metric_from_string(opt.metric);
  const Vocabulary vocab = Vocabulary::from_tsv(opt.vocab);
  const LoadResult loaded = load_jsonl(opt.corpus);
  const std::vector<FamilyGroup> groups =
      family_report(loaded.records, vocab, metric, opt.bandwidth);

  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  RunManifest manifest("stats");
  manifest.set_config(ordered_json{{"corpus", opt.corpus},
                                   {"vocab", opt.vocab},
                                   {"metric", opt.metric}});
  for (const FamilyGroup& g : groups) {
    const fs::path path =
        out_dir / ("stats_" + opt.metric + "_" + g.family + ".csv");
    if (g.density) {
      write_file(path, curve_to_csv(*g.density));
    } else if (g.cumulative) {
      write_file(path, curve_to_csv(*g.cumulative));
    } else {
      std::string raw = "x\n";
      for (double v : g.values) {
        raw += fmt_double(v);
        raw += '\n';
      }
      write_file(path, raw);
    }
    manifest.add_output(path);
  }
  write_file(out_dir / "report.json", report_manifest_to_json(groups, metric));
  manifest.add_output(out_dir / "report.json");
  manifest.write(out_dir);
  std::cout << groups.size() << " family group(s) reported\n";
}

struct GenPromptsOptions {
  std::string corpus;
  std::string out_dir;
};

void run_gen_prompts(const GenPromptsOptions& opt) {
  const LoadResult loaded = load_jsonl(opt.corpus);
  std::string out;
  std::size_t count = 0;
  for (const TextRecord& r : loaded.records) {
    if (r.label != Label::human) continue;
    ordered_json j;
    j["id"] = r.id;
    j["prompt"] = build_rewrite_prompt(r.text);
    out += j.dump();
    out += '\n';
    ++count;
  }
  if (count == 0) {
    fail(Errc::empty_input,
         "cli: corpus '" + opt.corpus + "' has no human essays to prompt");
  }
  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  write_file(out_dir / "prompts.jsonl", out);

  RunManifest manifest("gen-prompts");
  manifest.set_config(ordered_json{{"corpus", opt.corpus}});
  manifest.add_output(out_dir / "prompts.jsonl");
  manifest.write(out_dir);
  std::cout << count << " prompts written\n";
}

struct GenRunOptions {
  std::string config_path;
  std::string corpus;
  std::string out_dir;
};

/// Order-preserving parallel map over [0, n) with a bounded worker count.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count = std::min(workers, n);
  pool.reserve(count);
  for (std::size_t w = 0; w < count; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

void run_gen_run(const GenRunOptions& opt) {
  if (opt.config_path.empty()) {
    fail(Errc::config_error, "cli: gen-run needs --config");
  }
  const RunConfig config = parse_run_config(opt.config_path);
  if (config.gen.models.empty()) {
    fail(Errc::config_error, "cli: gen.models is empty");
  }
  if (config.gen.provider != "mock") {
    fail(Errc::config_error,
         "cli: unknown provider '" + config.gen.provider +
             "' (only 'mock' is bundled; network providers plug in as "
             "library clients)");
  }
  std::map<std::string, std::string> families;
  if (!config.eval.families.empty()) {
    families = load_families_json(config.eval.families);
  }
  auto family_of = [&](const std::string& model) {
    auto it = families.find(model);
    return it == families.end() ? model : it->second;
  };

  const LoadResult loaded = load_jsonl(opt.corpus);
  std::vector<const TextRecord*> essays;
  for (const TextRecord& r : loaded.records) {
    if (r.label == Label::human) essays.push_back(&r);
  }
  if (essays.empty()) {
    fail(Errc::empty_input,
         "cli: corpus '" + opt.corpus + "' has no human essays");
  }

  // Requests are laid out (and parameters drawn) before any dispatch, so
  // the worker count never changes the result.
  struct Job {
    const TextRecord* essay;
    std::string model;
    GenParams params;
  };
  std::vector<Job> jobs;
  std::mt19937_64 rng(config.gen.seed);
  for (std::size_t m = 0; m < config.gen.models.size(); ++m) {
    for (std::size_t e = 0; e < essays.size(); ++e) {
      if (!config.gen.shared_sources && e % config.gen.models.size() != m) {
        continue;
      }
      jobs.push_back({essays[e], config.gen.models[m], sample_gen_params(rng)});
    }
  }

  MockProvider provider;
  std::mutex provider_mutex;
  std::vector<TextRecord> outputs(jobs.size());
  parallel_for(jobs.size(), config.gen.concurrency, [&](std::size_t i) {
    const Job& job = jobs[i];
    RetryPolicy retry;
    retry.base_delay = std::chrono::milliseconds(0);
    RewriteResult r = [&] {
      std::scoped_lock lock(provider_mutex);  // the mock is not thread-safe
      return rewrite_essay(provider, job.model, family_of(job.model),
                           job.essay->id, job.essay->text, job.params, retry);
    }();
    outputs[i] = std::move(r.record);
  });

  std::map<std::string, std::vector<TextRecord>> rewritten;
  for (TextRecord& r : outputs) {
    rewritten[*r.generator_model].push_back(std::move(r));
  }
  std::vector<TextRecord> humans;
  humans.reserve(essays.size());
  for (const TextRecord* e : essays) humans.push_back(*e);

  const RipSplits splits =
      assemble_rip(humans, rewritten, config.gen.quota, config.gen.seed);

  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  save_jsonl(splits.train, out_dir / "rip_train.jsonl");
  save_jsonl(splits.test, out_dir / "rip_test.jsonl");

  RunManifest manifest("gen-run");
  manifest.set_config(config_snapshot(config));
  manifest.add_seed("gen", config.gen.seed);
  manifest.add_output(out_dir / "rip_train.jsonl");
  manifest.add_output(out_dir / "rip_test.jsonl");
  manifest.write(out_dir);
  std::cout << "rip splits: train " << splits.train.size() << ", test "
            << splits.test.size() << "\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"AIG-text detection toolkit"};
  app.require_subcommand(1);

  IngestOptions ingest_opt;
  auto* ingest = app.add_subcommand("ingest", "validate a JSONL corpus");
  ingest->add_option("--corpus", ingest_opt.corpus, "corpus JSONL path")
      ->required();
  ingest->add_option("--out", ingest_opt.out_dir, "output directory")
      ->required();

  SynthOptions synth_opt;
  auto* synth =
      app.add_subcommand("synth", "generate a synthetic labeled corpus");
  synth->add_option("--out", synth_opt.out_dir, "output directory")
      ->required();
  synth->add_option("--n-human", synth_opt.config.n_human,
                    "human training records");
  synth->add_option("--n-aig", synth_opt.config.n_aig,
                    "aig training records");
  synth->add_option("--test-human", synth_opt.test_human,
                    "human test records");
  synth->add_option("--test-aig", synth_opt.test_aig, "aig test records");
  synth->add_option("--separability", synth_opt.config.separability,
                    "class separability in [0,1]");
  synth->add_option("--vocab-size", synth_opt.config.vocab_size,
                    "in-vocabulary token count");
  synth->add_option("--seed", synth_opt.config.seed, "generation seed");

  TrainOptions train_opt;
  auto* train_cmd = app.add_subcommand("train", "train a detector");
  train_cmd->add_option("--config", train_opt.config_path, "run config file");
  train_cmd->add_option("--corpus", train_opt.corpus, "training corpus JSONL");
  train_cmd->add_option("--vocab", train_opt.vocab, "vocabulary TSV");
  train_cmd->add_option("--out", train_opt.out_dir, "output directory")
      ->required();
  std::uint64_t train_seed = 0;
  auto* seed_opt =
      train_cmd->add_option("--seed", train_seed, "override train.seed");

  EvalOptions eval_opt;
  auto* eval_cmd =
      app.add_subcommand("eval", "evaluate a checkpoint per generator model");
  eval_cmd->add_option("--ckpt", eval_opt.ckpt, "checkpoint path")->required();
  eval_cmd->add_option("--corpus", eval_opt.corpus, "test corpus JSONL")
      ->required();
  eval_cmd->add_option("--vocab", eval_opt.vocab, "vocabulary TSV")
      ->required();
  eval_cmd->add_option("--out", eval_opt.out_dir, "output directory")
      ->required();
  eval_cmd->add_option("--train-model", eval_opt.train_model,
                       "tag rows with the model the checkpoint was trained "
                       "on (also emits evals.csv)");

  MatrixOptions matrix_opt;
  auto* matrix_cmd =
      app.add_subcommand("matrix", "aggregate evals into a family matrix");
  matrix_cmd->add_option("--evals", matrix_opt.evals, "evals CSV")->required();
  matrix_cmd->add_option("--families", matrix_opt.families,
                         "model-to-family JSON map")
      ->required();
  matrix_cmd->add_option("--out", matrix_opt.out_dir, "output directory")
      ->required();

  StatsOptions stats_opt;
  auto* stats_cmd =
      app.add_subcommand("stats", "entropy/OOV distribution reports");
  stats_cmd->add_option("--corpus", stats_opt.corpus, "corpus JSONL")
      ->required();
  stats_cmd->add_option("--vocab", stats_opt.vocab, "vocabulary TSV")
      ->required();
  stats_cmd->add_option("--metric", stats_opt.metric,
                        "entropy or oov_ratio");
  double stats_bw = 0.0;
  auto* bw_opt = stats_cmd->add_option("--bandwidth", stats_bw,
                                       "explicit KDE bandwidth");
  stats_cmd->add_option("--out", stats_opt.out_dir, "output directory")
      ->required();

  GenPromptsOptions prompts_opt;
  auto* prompts_cmd =
      app.add_subcommand("gen-prompts", "emit rewrite prompts for essays");
  prompts_cmd->add_option("--corpus", prompts_opt.corpus, "corpus JSONL")
      ->required();
  prompts_cmd->add_option("--out", prompts_opt.out_dir, "output directory")
      ->required();

  GenRunOptions gen_opt;
  auto* gen_cmd = app.add_subcommand(
      "gen-run", "run a rewrite generation job and assemble splits");
  gen_cmd->add_option("--config", gen_opt.config_path, "run config file")
      ->required();
  gen_cmd->add_option("--corpus", gen_opt.corpus, "human essay corpus JSONL")
      ->required();
  gen_cmd->add_option("--out", gen_opt.out_dir, "output directory")
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*ingest) {
      run_ingest(ingest_opt);
    } else if (*synth) {
      run_synth(synth_opt);
    } else if (*train_cmd) {
      if (*seed_opt) train_opt.seed = train_seed;
      run_train(train_opt);
    } else if (*eval_cmd) {
      run_eval(eval_opt);
    } else if (*matrix_cmd) {
      run_matrix(matrix_opt);
    } else if (*stats_cmd) {
      if (*bw_opt) stats_opt.bandwidth = stats_bw;
      run_stats(stats_opt);
    } else if (*prompts_cmd) {
      run_gen_prompts(prompts_opt);
    } else if (*gen_cmd) {
      run_gen_run(gen_opt);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: cli: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace aigdetect
