#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "styx/corpus.hpp"
#include "styx/error.hpp"
#include "styx/features.hpp"
#include "styx/llm/generate.hpp"
#include "styx/ml/stacking.hpp"
#include "styx/text.hpp"

namespace styx::app {

#ifdef STYX_DATA_DIR
inline constexpr std::string_view kDataDir = STYX_DATA_DIR;
#else
inline constexpr std::string_view kDataDir = "data";
#endif

/// Everything a subcommand needs. Paths are absolute once loaded.
struct RunConfig {
  std::uint64_t seed = 42;
  std::filesystem::path corpus;
  std::filesystem::path conllu;
  std::filesystem::path out_dir = "out";
  std::filesystem::path cache_dir = ".styx-cache";
  std::filesystem::path model;
  std::filesystem::path features;
  std::filesystem::path features_b;
  std::string label_a = "blog";
  std::string label_b = "gpt";
  ColumnMapping columns;
  std::vector<std::string> metrics;  // empty = whole catalog
  std::filesystem::path lexicon = std::filesystem::path(kDataDir) / "fallback_lexicon.tsv";
  std::filesystem::path discourse_markers;  // empty = built-in list
  std::filesystem::path stopwords = std::filesystem::path(kDataDir) / "stopwords.txt";
  bool fallback_tagger = false;
  bool strict = false;
  bool svg = false;
  std::size_t top_k = 20;
  unsigned threads = 1;
  ml::StackedOptions train;
  llm::GenSpec gen;
  std::string llm_base_url = "https://api.openai.com/v1";
  std::filesystem::path replay;

  std::filesystem::path model_path() const { return model.empty() ? out_dir / "model.styx" : model; }
  std::vector<std::string> metric_list() const;
};

namespace detail {

enum class KeyType { Int, Float, Bool, String, Path, List };

struct KeyDef {
  std::string_view name;
  KeyType type;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const auto x = parse_int(v);
  if (!x || *x < 0) throw Error("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(*x);
}
inline double to_f64(const std::string& key, const std::string& v) {
  const auto x = parse_double(v);
  if (!x) throw Error("config key '" + key + "': expected a number, got '" + v + "'");
  return *x;
}
inline bool to_bool(const std::string& key, const std::string& v) {
  const auto l = to_lower(trim(v));
  if (l == "true" || l == "1" || l == "yes") return true;
  if (l == "false" || l == "0" || l == "no") return false;
  throw Error("config key '" + key + "': expected true/false, got '" + v + "'");
}
inline std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  for (auto& part : split(v, ',')) out.emplace_back(trim(part));
  return out;
}
inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

#define STYX_INT(key, field)                                                                           \
  KeyDef{key, KeyType::Int, [](RunConfig& c, const std::string& v) { c.field = static_cast<decltype(c.field)>(to_u64(key, v)); }, \
         [](const RunConfig& c) { return std::to_string(c.field); }}
#define STYX_FLOAT(key, field)                                                               \
  KeyDef{key, KeyType::Float, [](RunConfig& c, const std::string& v) { c.field = to_f64(key, v); }, \
         [](const RunConfig& c) { return format_double(c.field); }}
#define STYX_BOOL(key, field)                                                                \
  KeyDef{key, KeyType::Bool, [](RunConfig& c, const std::string& v) { c.field = to_bool(key, v); }, \
         [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }}
#define STYX_STRING(key, field)                                                     \
  KeyDef{key, KeyType::String, [](RunConfig& c, const std::string& v) { c.field = v; }, \
         [](const RunConfig& c) { return std::string(c.field); }}
#define STYX_PATH(key, field)                                                     \
  KeyDef{key, KeyType::Path, [](RunConfig& c, const std::string& v) { c.field = v; }, \
         [](const RunConfig& c) { return c.field.string(); }}

inline const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      STYX_INT("seed", seed),
      STYX_PATH("corpus", corpus),
      STYX_PATH("conllu", conllu),
      STYX_PATH("out_dir", out_dir),
      STYX_PATH("cache_dir", cache_dir),
      STYX_PATH("model", model),
      STYX_PATH("features", features),
      STYX_PATH("features_b", features_b),
      STYX_STRING("label_a", label_a),
      STYX_STRING("label_b", label_b),
      STYX_STRING("columns.id", columns.author_id),
      STYX_STRING("columns.gender", columns.gender),
      STYX_STRING("columns.age", columns.age),
      STYX_STRING("columns.topic", columns.topic),
      STYX_STRING("columns.sign", columns.sign),
      STYX_STRING("columns.date", columns.date),
      STYX_STRING("columns.text", columns.text),
      STYX_STRING("columns.doc_id", columns.doc_id),
      KeyDef{"metrics", KeyType::List, [](RunConfig& c, const std::string& v) { c.metrics = to_list(v); },
             [](const RunConfig& c) { return join(c.metrics); }},
      STYX_PATH("lexicon", lexicon),
      STYX_PATH("discourse_markers", discourse_markers),
      STYX_PATH("stopwords", stopwords),
      STYX_BOOL("fallback_tagger", fallback_tagger),
      STYX_BOOL("strict", strict),
      STYX_BOOL("svg", svg),
      STYX_INT("top_k", top_k),
      STYX_INT("threads", threads),
      STYX_INT("train.folds", train.folds),
      STYX_INT("train.pca_components", train.pca_components),
      STYX_FLOAT("logistic.l2", train.hyper.logistic.l2),
      STYX_INT("logistic.max_iter", train.hyper.logistic.max_iter),
      STYX_FLOAT("logistic.tol", train.hyper.logistic.tol),
      STYX_FLOAT("logistic.learning_rate", train.hyper.logistic.learning_rate),
      STYX_INT("forest.trees", train.hyper.forest.trees),
      STYX_INT("forest.max_depth", train.hyper.forest.max_depth),
      STYX_INT("boosting.rounds", train.hyper.boosting.rounds),
      STYX_INT("boosting.max_depth", train.hyper.boosting.max_depth),
      STYX_FLOAT("boosting.learning_rate", train.hyper.boosting.learning_rate),
      STYX_INT("meta.rounds", train.hyper.meta.rounds),
      STYX_INT("meta.max_depth", train.hyper.meta.max_depth),
      STYX_FLOAT("meta.learning_rate", train.hyper.meta.learning_rate),
      STYX_FLOAT("svm.l2", train.hyper.svm.l2),
      STYX_INT("svm.epochs", train.hyper.svm.epochs),
      STYX_FLOAT("svm.learning_rate", train.hyper.svm.learning_rate),
      STYX_INT("mlp.hidden", train.hyper.mlp.hidden),
      STYX_FLOAT("mlp.learning_rate", train.hyper.mlp.learning_rate),
      STYX_FLOAT("mlp.momentum", train.hyper.mlp.momentum),
      STYX_INT("mlp.epochs", train.hyper.mlp.epochs),
      STYX_INT("mlp.batch_size", train.hyper.mlp.batch_size),
      STYX_STRING("llm.base_url", llm_base_url),
      STYX_STRING("llm.model", gen.model),
      STYX_FLOAT("llm.temperature", gen.temperature),
      STYX_INT("llm.n_samples", gen.n_samples),
      STYX_INT("llm.max_words", gen.max_words),
      STYX_INT("llm.max_age", gen.max_age),
      KeyDef{"llm.topics", KeyType::List, [](RunConfig& c, const std::string& v) { c.gen.topics = to_list(v); },
             [](const RunConfig& c) { return join(c.gen.topics); }},
      STYX_INT("llm.concurrency", gen.concurrency),
      STYX_PATH("llm.replay", replay),
  };
  return table;
}

#undef STYX_INT
#undef STYX_FLOAT
#undef STYX_BOOL
#undef STYX_STRING
#undef STYX_PATH

inline const KeyDef& find_key(std::string_view name) {
  for (const auto& k : key_table())
    if (k.name == name) return k;
  throw Error("unknown config key '" + std::string(name) + "'");
}

}  // namespace detail

inline std::vector<std::string> RunConfig::metric_list() const {
  if (metrics.empty()) return metric_names();
  return metrics;
}

inline std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : detail::key_table()) out.emplace_back(k.name);
  return out;
}

/// Sets one key. Relative paths are resolved against `base`.
inline void set_config_value(RunConfig& cfg, std::string_view key, const std::string& value,
                             const std::filesystem::path& base) {
  const auto& def = detail::find_key(key);
  if (def.type == detail::KeyType::Path && !value.empty()) {
    std::filesystem::path p(value);
    def.set(cfg, (p.is_absolute() ? p : base / p).lexically_normal().string());
  } else {
    def.set(cfg, value);
  }
}

/// Parses `key = value` lines; `#` starts a comment line. Unknown keys and
/// malformed lines are errors. Relative paths resolve against `base`.
inline void apply_config_text(RunConfig& cfg, std::string_view text, const std::filesystem::path& base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw Error("config line " + std::to_string(n) + ": expected key = value");
    try {
      set_config_value(cfg, trim(t.substr(0, eq)), std::string(trim(t.substr(eq + 1))), base);
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(n) + ": " + e.what());
    }
  }
}

inline void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  const auto abs = std::filesystem::absolute(path);
  apply_config_text(cfg, read_file(abs.string()), abs.parent_path());
}

/// Makes every path absolute (relative to the working directory) and checks
/// metric names, so nothing fails halfway through a run for these reasons.
inline void finalize_config(RunConfig& cfg) {
  const auto cwd = std::filesystem::current_path();
  for (const auto& def : detail::key_table()) {
    if (def.type != detail::KeyType::Path) continue;
    const std::string v = def.get(cfg);
    if (!v.empty() && !std::filesystem::path(v).is_absolute()) def.set(cfg, (cwd / v).lexically_normal().string());
  }
  for (const auto& m : cfg.metrics)
    if (!parse_metric(m)) throw Error("unknown metric '" + m + "'");
}

/// Every key with its effective value, one `key = value` per line.
inline void write_effective_config(std::ostream& out, const RunConfig& cfg) {
  for (const auto& def : detail::key_table()) out << def.name << " = " << def.get(cfg) << '\n';
}

}  // namespace styx::app
