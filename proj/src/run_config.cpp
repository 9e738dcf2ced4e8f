#include "aigdetect/run_config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace aigdetect {

namespace {

struct ConfigValue {
  std::string raw;
  std::string source;
  std::size_t line = 0;

  [[noreturn]] void reject(const std::string& why) const {
    fail(Errc::config_error, "config: " + why + " at " + source + ":" +
                                 std::to_string(line));
  }

  std::string as_string() const {
    std::string_view v = trim_view(raw);
    if (v.size() < 2 || v.front() != '"' || v.back() != '"') {
      reject("expected a quoted string");
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      char c = v[i];
      if (c == '\\') {
        if (i + 2 >= v.size()) reject("dangling escape");
        char n = v[++i];
        if (n == '"' || n == '\\') {
          out.push_back(n);
        } else if (n == 'n') {
          out.push_back('\n');
        } else if (n == 't') {
          out.push_back('\t');
        } else {
          reject("unsupported escape sequence");
        }
      } else if (c == '"') {
        reject("unescaped quote inside string");
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  double as_double() const {
    std::string_view v = trim_view(raw);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size() ||
        !std::isfinite(value)) {
      reject("expected a finite number");
    }
    return value;
  }

  std::uint64_t as_uint() const {
    std::string_view v = trim_view(raw);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      reject("expected a nonnegative integer");
    }
    return value;
  }

  bool as_bool() const {
    std::string_view v = trim_view(raw);
    if (v == "true") return true;
    if (v == "false") return false;
    reject("expected true or false");
  }

  std::vector<std::string> as_string_list() const {
    std::string_view v = trim_view(raw);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
      reject("expected a [\"...\"] list");
    }
    std::vector<std::string> out;
    std::string_view body = v.substr(1, v.size() - 2);
    std::size_t i = 0;
    while (i < body.size()) {
      while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;
      if (i == body.size()) break;
      if (body[i] != '"') reject("list elements must be quoted strings");
      std::size_t j = i + 1;
      std::string item;
      while (j < body.size() && body[j] != '"') {
        if (body[j] == '\\' && j + 1 < body.size()) ++j;
        item.push_back(body[j]);
        ++j;
      }
      if (j == body.size()) reject("unterminated string in list");
      out.push_back(std::move(item));
      i = j + 1;
      while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;
      if (i < body.size()) {
        if (body[i] != ',') reject("expected ',' between list elements");
        ++i;
      }
    }
    return out;
  }
};

}  // namespace

RunConfig parse_run_config_text(std::string_view text,
                                const std::string& source_name) {
  RunConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  std::size_t line_no = 0;

  auto apply = [&](const std::string& key, const ConfigValue& value) {
    const std::string qualified = section + "." + key;
    if (qualified == "corpus.train") {
      config.corpus.train = value.as_string();
    } else if (qualified == "corpus.validation") {
      config.corpus.validation = value.as_string();
    } else if (qualified == "corpus.test") {
      config.corpus.test = value.as_string();
    } else if (qualified == "features.dim") {
      config.features.dim = value.as_uint();
    } else if (qualified == "features.vocab") {
      config.features.vocab = value.as_string();
    } else if (qualified == "train.learning_rate") {
      config.train.learning_rate = value.as_double();
    } else if (qualified == "train.inner_lr") {
      config.train.inner_lr = value.as_double();
    } else if (qualified == "train.batch_size") {
      config.train.batch_size = value.as_uint();
    } else if (qualified == "train.sampling_rate") {
      config.train.sampling_rate = value.as_double();
    } else if (qualified == "train.epochs") {
      config.train.epochs = value.as_uint();
    } else if (qualified == "train.margin") {
      config.train.margin = value.as_double();
    } else if (qualified == "train.seed") {
      config.train.seed = value.as_uint();
    } else if (qualified == "eval.families") {
      config.eval.families = value.as_string();
    } else if (qualified == "stats.metric") {
      config.stats.metric = value.as_string();
    } else if (qualified == "stats.bandwidth") {
      config.stats.bandwidth = value.as_double();
    } else if (qualified == "gen.models") {
      config.gen.models = value.as_string_list();
    } else if (qualified == "gen.train_human") {
      config.gen.quota.train_human = value.as_uint();
    } else if (qualified == "gen.train_per_llm") {
      config.gen.quota.train_per_llm = value.as_uint();
    } else if (qualified == "gen.test_human") {
      config.gen.quota.test_human = value.as_uint();
    } else if (qualified == "gen.test_per_llm") {
      config.gen.quota.test_per_llm = value.as_uint();
    } else if (qualified == "gen.seed") {
      config.gen.seed = value.as_uint();
    } else if (qualified == "gen.provider") {
      config.gen.provider = value.as_string();
    } else if (qualified == "gen.concurrency") {
      config.gen.concurrency = value.as_uint();
    } else if (qualified == "gen.shared_sources") {
      config.gen.shared_sources = value.as_bool();
    } else {
      value.reject("unknown key '" + qualified + "'");
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = trim_view(line);
    if (v.empty() || v.front() == '#') continue;
    if (v.front() == '[') {
      if (v.back() != ']' || v.size() < 3) {
        fail(Errc::config_error, "config: malformed section header at " +
                                     source_name + ":" +
                                     std::to_string(line_no));
      }
      section = std::string(trim_view(v.substr(1, v.size() - 2)));
      if (section != "corpus" && section != "features" &&
          section != "train" && section != "eval" && section != "stats" &&
          section != "gen") {
        fail(Errc::config_error, "config: unknown section '" + section +
                                     "' at " + source_name + ":" +
                                     std::to_string(line_no));
      }
      continue;
    }
    auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      fail(Errc::config_error, "config: expected key = value at " +
                                   source_name + ":" +
                                   std::to_string(line_no));
    }
    if (section.empty()) {
      fail(Errc::config_error, "config: key outside any section at " +
                                   source_name + ":" +
                                   std::to_string(line_no));
    }
    const std::string key{trim_view(v.substr(0, eq))};
    if (key.empty()) {
      fail(Errc::config_error, "config: empty key at " + source_name + ":" +
                                   std::to_string(line_no));
    }
    ConfigValue value{std::string(trim_view(v.substr(eq + 1))), source_name,
                      line_no};
    apply(key, value);
  }
  return config;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  return parse_run_config_text(read_file(path), path.string());
}

}  // namespace aigdetect
