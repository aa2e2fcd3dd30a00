// styx: command-line driver for the corpus → features → analysis/model pipeline.

#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "styx/app/commands.hpp"
#include "styx/llm/http_transport.hpp"

namespace {

using styx::app::RunConfig;

struct Overrides {
  std::string config_file;
  std::vector<std::string> sets;  // key=value, applied in order after the file
  std::vector<std::pair<std::string, std::string>> flags;
};

void add_flag_override(CLI::App* cmd, Overrides& o, const std::string& flag, const std::string& key,
                       const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.flags.emplace_back(key, v); }, help);
}

void add_bool_override(CLI::App* cmd, Overrides& o, const std::string& flag, const std::string& key,
                       const std::string& help) {
  cmd->add_flag_callback(flag, [&o, key] { o.flags.emplace_back(key, "true"); }, help);
}

RunConfig build_config(const Overrides& o) {
  RunConfig cfg;
  if (!o.config_file.empty()) styx::app::load_config_file(cfg, o.config_file);
  const auto cwd = std::filesystem::current_path();
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw styx::Error("--set expects key=value, got '" + kv + "'");
    styx::app::set_config_value(cfg, styx::trim(kv.substr(0, eq)), std::string(styx::trim(kv.substr(eq + 1))), cwd);
  }
  for (const auto& [key, value] : o.flags) styx::app::set_config_value(cfg, key, value, cwd);
  styx::app::finalize_config(cfg);
  return cfg;
}

std::unique_ptr<styx::llm::ChatTransport> http_transport(const std::string& base_url, const std::string& key) {
  return std::make_unique<styx::llm::HttplibTransport>(base_url, key);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Syntactic style analysis of blog text by author age group"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Overrides o;
  app.add_option("--config", o.config_file, "Config file of key = value lines")->check(CLI::ExistingFile);
  add_flag_override(&app, o, "--seed", "seed", "Random seed (default 42)");
  add_flag_override(&app, o, "--out-dir", "out_dir", "Output directory");
  app.add_option("--set", o.sets, "Override any config key: --set key=value");

  auto* ingest = app.add_subcommand("ingest", "Filter and balance a blog corpus CSV");
  add_flag_override(ingest, o, "--corpus", "corpus", "Corpus CSV");

  auto* featurize = app.add_subcommand("featurize", "Compute the syntactic metrics per document");
  add_flag_override(featurize, o, "--corpus", "corpus", "Corpus CSV (usually balanced.csv)");
  add_flag_override(featurize, o, "--conllu", "conllu", "CoNLL-U parses keyed by newdoc id");
  add_bool_override(featurize, o, "--fallback-tagger", "fallback_tagger", "Tag raw text with the built-in tagger");
  add_bool_override(featurize, o, "--strict", "strict", "Fail when a document has no parse");
  add_flag_override(featurize, o, "--threads", "threads", "Worker threads");

  auto* compare = app.add_subcommand("compare", "Heatmap table of group means across two feature files");
  add_flag_override(compare, o, "--features", "features", "First features file");
  add_flag_override(compare, o, "--features-b", "features_b", "Second features file");
  add_flag_override(compare, o, "--label-a", "label_a", "Label for the first file");
  add_flag_override(compare, o, "--label-b", "label_b", "Label for the second file");
  add_flag_override(compare, o, "--metrics", "metrics", "Comma-separated metric subset");
  add_bool_override(compare, o, "--svg", "svg", "Also write comparison.svg");

  auto* train = app.add_subcommand("train", "Fit the stacked age-group classifier");
  add_flag_override(train, o, "--features", "features", "Labeled features file");
  add_flag_override(train, o, "--model", "model", "Model output path");

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a labeled features file");
  add_flag_override(evaluate, o, "--features", "features", "Labeled features file");
  add_flag_override(evaluate, o, "--model", "model", "Model file");

  auto* predict = app.add_subcommand("predict", "Predict age groups for a features file");
  add_flag_override(predict, o, "--features", "features", "Features file");
  add_flag_override(predict, o, "--model", "model", "Model file");

  auto* generate = app.add_subcommand("generate", "Generate a synthetic corpus from a chat model");
  add_flag_override(generate, o, "--corpus", "corpus", "Corpus to take topics from");
  add_flag_override(generate, o, "--n", "llm.n_samples", "Number of samples");
  add_flag_override(generate, o, "--replay", "llm.replay", "Replay fixture (JSONL) instead of the network");
  add_flag_override(generate, o, "--topics", "llm.topics", "Comma-separated topics");

  auto* freq = app.add_subcommand("freq", "Top word forms per age group");
  add_flag_override(freq, o, "--corpus", "corpus", "Corpus CSV");
  add_flag_override(freq, o, "--conllu", "conllu", "CoNLL-U parses keyed by newdoc id");
  add_bool_override(freq, o, "--fallback-tagger", "fallback_tagger", "Tag raw text with the built-in tagger");
  add_flag_override(freq, o, "--top-k", "top_k", "Forms per group");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : styx::app::kExitInput;
  }

  return styx::app::run_command([&] {
    const RunConfig cfg = build_config(o);
    auto& log = std::cerr;
    if (ingest->parsed()) styx::app::cmd_ingest(cfg, log);
    else if (featurize->parsed()) styx::app::cmd_featurize(cfg, log);
    else if (compare->parsed()) styx::app::cmd_compare(cfg, log);
    else if (train->parsed()) styx::app::cmd_train(cfg, log);
    else if (evaluate->parsed()) styx::app::cmd_evaluate(cfg, std::cout);
    else if (predict->parsed()) styx::app::cmd_predict(cfg, log);
    else if (generate->parsed()) styx::app::cmd_generate(cfg, log, http_transport);
    else if (freq->parsed()) styx::app::cmd_freq(cfg, log);
  });
}
