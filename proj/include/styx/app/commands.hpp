#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "styx/analysis.hpp"
#include "styx/app/config.hpp"
#include "styx/conllu.hpp"
#include "styx/corpus.hpp"
#include "styx/error.hpp"
#include "styx/fallback_tagger.hpp"
#include "styx/features.hpp"
#include "styx/features_io.hpp"
#include "styx/llm/generate.hpp"
#include "styx/ml/eval.hpp"
#include "styx/ml/model_io.hpp"
#include "styx/ml/stacking.hpp"

namespace styx::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitExternal = 3;

/// Builds the live chat transport; the CLI supplies an HTTP one.
using TransportFactory =
    std::function<std::unique_ptr<llm::ChatTransport>(const std::string& base_url, const std::string& api_key)>;

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + (dir / name).string());
  return out;
}

inline void echo_config(const RunConfig& cfg) {
  auto out = open_output(cfg.out_dir, "effective_config.txt");
  write_effective_config(out, cfg);
}

inline void require(const std::filesystem::path& p, const std::string& key) {
  if (p.empty()) throw Error("missing required setting '" + key + "'");
}

/// Corpus records paired with their parsed documents. Records without a
/// parse are listed in `missing` and left out.
struct LoadedDocuments {
  std::vector<BlogRecord> records;
  std::vector<ParsedDocument> docs;
  std::vector<std::string> missing;
};

inline LoadedDocuments load_documents(const RunConfig& cfg, std::ostream& log) {
  require(cfg.corpus, "corpus");
  auto read = read_corpus_csv(cfg.corpus.string(), cfg.columns);
  for (const auto& r : read.rejects) log << "warning: corpus line " << r.line << " rejected: " << r.reason << '\n';

  LoadedDocuments out;
  if (cfg.fallback_tagger) {
    const FallbackTagger tagger(Lexicon::load(cfg.lexicon.string()));
    for (auto& r : read.records) {
      out.docs.push_back(tagger.tag(r.text, r.doc_id));
      out.records.push_back(std::move(r));
    }
    return out;
  }
  require(cfg.conllu, "conllu");
  std::ifstream in(cfg.conllu, std::ios::binary);
  if (!in) throw Error("cannot open CoNLL-U file: " + cfg.conllu.string());
  std::unordered_map<std::string, ParsedDocument> by_id;
  ConlluReader reader(in);
  while (auto d = reader.next()) {
    std::string id = d->doc_id;
    by_id.insert_or_assign(std::move(id), std::move(*d));
  }
  for (auto& r : read.records) {
    auto it = by_id.find(r.doc_id);
    if (it == by_id.end()) {
      out.missing.push_back(r.doc_id);
      continue;
    }
    out.docs.push_back(std::move(it->second));
    by_id.erase(it);
    out.records.push_back(std::move(r));
  }
  return out;
}

inline MarkerLexicon marker_lexicon(const RunConfig& cfg) {
  return cfg.discourse_markers.empty() ? MarkerLexicon() : MarkerLexicon::load(cfg.discourse_markers.string());
}

inline std::optional<AgeGroup> group_of(const BlogRecord& r) { return derive_age_group(r.age); }

/// Labeled rows of a feature table, checked against the metric catalog.
inline std::pair<ml::SparseRows, std::vector<int>> labeled_rows(const FeatureTable& t, std::ostream& log) {
  ml::SparseRows x;
  std::vector<int> y;
  std::size_t unlabeled = 0;
  for (const auto& r : t.rows) {
    if (!r.group) {
      ++unlabeled;
      continue;
    }
    x.emplace_back(r.features.values.begin(), r.features.values.end());
    y.push_back(ml::encode(*r.group));
  }
  if (unlabeled) log << "warning: skipped " << unlabeled << " rows without an age group\n";
  return {std::move(x), std::move(y)};
}

inline void check_catalog(const FeatureTable& t, const ml::LoadedModel& m) {
  if (catalog_hash(t.columns) != m.catalog_hash)
    throw Error("catalog hash mismatch: features file columns do not match the model's feature order");
}

inline ml::SparseRows raw_rows(const FeatureTable& t) { return t.raw; }

}  // namespace detail

/// ingest: read, drop under-18 rows, balance. Writes balanced.csv and rejects.csv.
inline void cmd_ingest(const RunConfig& cfg, std::ostream& log) {
  detail::require(cfg.corpus, "corpus");
  auto read = read_corpus_csv(cfg.corpus.string(), cfg.columns);
  std::vector<RejectedRow> rejects = read.rejects;
  std::vector<GroupedRecord> grouped;
  std::size_t under = 0;
  for (auto& r : read.records) {
    if (auto g = detail::group_of(r)) {
      grouped.push_back({std::move(r), *g});
    } else {
      ++under;
      rejects.push_back({r.source_line, "under 18"});
    }
  }
  std::sort(rejects.begin(), rejects.end(), [](const RejectedRow& a, const RejectedRow& b) { return a.line < b.line; });
  const BalancedCorpus balanced = balance(grouped, cfg.seed);

  detail::echo_config(cfg);
  {
    auto out = detail::open_output(cfg.out_dir, "balanced.csv");
    write_balanced_csv(out, balanced.records);
  }
  {
    auto out = detail::open_output(cfg.out_dir, "rejects.csv");
    write_reject_report(out, rejects);
  }
  log << "rows read: " << read.rows_in << ", rejected: " << read.rejects.size() << ", under 18: " << under << '\n';
  for (AgeGroup g : kAgeGroups) log << to_string(g) << ": " << balanced.per_group_count << '\n';
}

/// featurize: one feature row per corpus document. Writes features.csv and
/// features.jsonl.
inline void cmd_featurize(const RunConfig& cfg, std::ostream& log) {
  auto loaded = detail::load_documents(cfg, log);
  if (!loaded.missing.empty()) {
    log << "warning: " << loaded.missing.size() << " documents have no parse:";
    for (const auto& id : loaded.missing) log << ' ' << id;
    log << '\n';
    if (cfg.strict) throw Error(std::to_string(loaded.missing.size()) + " documents missing from the CoNLL-U input");
  }
  const auto vectors = featurize_all(loaded.docs, detail::marker_lexicon(cfg), cfg.threads);
  std::vector<LabeledFeatures> rows;
  for (std::size_t i = 0; i < vectors.size(); ++i) rows.push_back({vectors[i], detail::group_of(loaded.records[i])});

  detail::echo_config(cfg);
  {
    auto out = detail::open_output(cfg.out_dir, "features.csv");
    write_features_csv(out, rows);
  }
  {
    auto out = detail::open_output(cfg.out_dir, "features.jsonl");
    write_features_jsonl(out, rows);
  }
  log << "documents featurized: " << rows.size() << '\n';
  log << "null counts:";
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    std::size_t nulls = 0;
    for (const auto& r : rows) nulls += r.features.values[m] ? 0 : 1;
    log << ' ' << kMetricNames[m] << '=' << nulls;
  }
  log << '\n';
  if (cfg.fallback_tagger)
    log << "note: fallback tagger produces no dependency trees; clauses_per_sentence and mean_yngve_depth are null\n";
}

/// compare: heatmap table of group means for two feature files, plus
/// per-group variance rows for each selected metric.
inline void cmd_compare(const RunConfig& cfg, std::ostream& log) {
  detail::require(cfg.features, "features");
  detail::require(cfg.features_b, "features_b");
  const auto a = read_features_csv(cfg.features.string());
  const auto b = read_features_csv(cfg.features_b.string());
  if (!a.matches_catalog() || !b.matches_catalog()) throw Error("features file columns do not match the metric catalog");
  const auto sa = aggregate(a.rows), sb = aggregate(b.rows);
  const auto metrics = cfg.metric_list();
  const ComparisonTable table = compare(sa, cfg.label_a, sb, cfg.label_b, metrics);

  detail::echo_config(cfg);
  {
    auto out = detail::open_output(cfg.out_dir, "comparison.csv");
    write_comparison_csv(out, table);
  }
  {
    auto out = detail::open_output(cfg.out_dir, "comparison.json");
    out << comparison_json(table).dump(2) << '\n';
  }
  if (cfg.svg) {
    auto out = detail::open_output(cfg.out_dir, "comparison.svg");
    write_comparison_svg(out, table);
  }
  {
    auto out = detail::open_output(cfg.out_dir, "variance.csv");
    csv::write_row(out, {"corpus", "metric", "age_group", "mean", "sd", "sd_over_mean", "flagged"});
    for (const auto& [label, summaries] : {std::pair{cfg.label_a, &sa}, std::pair{cfg.label_b, &sb}})
      for (Metric m : table.rows)
        for (const auto& r : variance_report(*summaries, m))
          csv::write_row(out, {label, std::string(to_string(m)), std::string(to_string(r.group)),
                               r.mean ? format_double(*r.mean) : "", r.sd ? format_double(*r.sd) : "",
                               r.ratio ? format_double(*r.ratio) : "", r.flagged ? "1" : "0"});
  }
  log << "comparison: " << table.rows.size() << " metrics x " << table.columns.size() << " columns\n";
}

/// train: fit the stacked model on a labeled features file.
inline void cmd_train(const RunConfig& cfg, std::ostream& log) {
  detail::require(cfg.features, "features");
  const auto table = read_features_csv(cfg.features.string());
  if (!table.matches_catalog()) throw Error("features file columns do not match the metric catalog");
  auto [x, y] = detail::labeled_rows(table, log);
  const auto model = ml::fit_stacked(x, y, cfg.seed, cfg.train, table.columns);
  detail::echo_config(cfg);
  std::filesystem::create_directories(cfg.model_path().parent_path());
  ml::save_model(model, cfg.model_path().string());
  log << "trained on " << y.size() << " rows; dropped features:";
  if (model.scaler.dropped.empty()) log << " none";
  for (std::size_t c : model.scaler.dropped) log << ' ' << table.columns[c];
  log << "\nPCA explained variance ratio:";
  for (double r : model.pca.explained_ratio) log << ' ' << format_double(r);
  log << "\nmodel written to " << cfg.model_path().string() << '\n';
}

/// evaluate: accuracy, per-class precision/recall and confusion matrix.
inline ml::EvalReport cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  detail::require(cfg.features, "features");
  const auto loaded = ml::load_model(cfg.model_path().string());
  const auto table = read_features_csv(cfg.features.string());
  detail::check_catalog(table, loaded);
  auto [x, y] = detail::labeled_rows(table, log);
  const auto report = ml::evaluate(loaded.model, x, y);
  detail::echo_config(cfg);
  const std::string json = ml::to_json(report).dump(2);
  {
    auto out = detail::open_output(cfg.out_dir, "eval.json");
    out << json << '\n';
  }
  log << json << '\n';
  return report;
}

/// predict: per-document group and class probabilities.
inline void cmd_predict(const RunConfig& cfg, std::ostream& log) {
  detail::require(cfg.features, "features");
  const auto loaded = ml::load_model(cfg.model_path().string());
  const auto table = read_features_csv(cfg.features.string());
  detail::check_catalog(table, loaded);
  const auto predictions = loaded.model.predict(detail::raw_rows(table));
  detail::echo_config(cfg);
  auto out = detail::open_output(cfg.out_dir, "predictions.csv");
  csv::write_row(out, {"doc_id", "predicted", "p_young", "p_middle_aged", "p_old"});
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    csv::write_row(out, {table.rows[i].features.doc_id, std::string(to_string(p.group)), format_double(p.probabilities[0]),
                         format_double(p.probabilities[1]), format_double(p.probabilities[2])});
  }
  log << "predictions: " << predictions.size() << '\n';
}

/// generate: synthetic corpus from the chat endpoint, or from a replay
/// fixture when llm.replay is set.
inline void cmd_generate(const RunConfig& cfg, std::ostream& log, const TransportFactory& make_transport,
                         const char* api_key = std::getenv(llm::kApiKeyVariableName)) {
  llm::GenSpec spec = cfg.gen;
  spec.seed = cfg.seed;
  if (spec.topics.empty()) {
    if (cfg.corpus.empty()) throw Error("no topics: set llm.topics or point corpus at a blog corpus");
    std::set<std::string> topics;
    for (const auto& r : read_corpus_csv(cfg.corpus.string(), cfg.columns).records)
      if (r.topic && !r.topic->empty()) topics.insert(*r.topic);
    spec.topics.assign(topics.begin(), topics.end());
  }

  std::vector<llm::GenRecord> records;
  if (!cfg.replay.empty()) {
    auto source = llm::ReplaySource::from_file(cfg.replay.string());
    records = llm::generate(spec, source);
  } else {
    if (!api_key || !*api_key)
      throw llm::GenError(llm::GenFailure::Auth,
                          std::string("authentication failed: environment variable ") + llm::kApiKeyVariableName + " is not set");
    auto transport = make_transport(cfg.llm_base_url, api_key);
    llm::LiveSource source(*transport, spec.model, spec.temperature, cfg.cache_dir);
    records = llm::generate(spec, source);
    log << "network requests: " << source.network_calls() << '\n';
  }
  detail::echo_config(cfg);
  auto out = detail::open_output(cfg.out_dir, "generated.csv");
  llm::export_gen_corpus(out, records);
  log << "generated " << records.size() << " samples\n";
}

/// freq: top-k word forms per age group.
inline void cmd_freq(const RunConfig& cfg, std::ostream& log) {
  auto loaded = detail::load_documents(cfg, log);
  std::vector<std::pair<ParsedDocument, AgeGroup>> docs;
  for (std::size_t i = 0; i < loaded.docs.size(); ++i)
    if (auto g = detail::group_of(loaded.records[i])) docs.emplace_back(std::move(loaded.docs[i]), *g);
  const auto words = read_word_list(cfg.stopwords.string());
  const std::unordered_set<std::string> stop(words.begin(), words.end());
  const auto ranked = token_frequency(docs, cfg.top_k, stop);
  detail::echo_config(cfg);
  auto out = detail::open_output(cfg.out_dir, "freq.csv");
  csv::write_row(out, {"age_group", "rank", "form", "count"});
  for (AgeGroup g : kAgeGroups) {
    const auto it = ranked.find(g);
    if (it == ranked.end() || it->second.empty()) {
      log << "warning: no words for group " << to_string(g) << '\n';
      continue;
    }
    for (std::size_t r = 0; r < it->second.size(); ++r)
      csv::write_row(out, {std::string(to_string(g)), std::to_string(r + 1), it->second[r].first,
                           std::to_string(it->second[r].second)});
  }
}

/// Runs `body`, mapping errors onto exit codes: 2 for input problems,
/// 3 for external services.
template <typename Body>
int run_command(Body&& body, std::ostream& err = std::cerr) {
  try {
    body();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::External ? kExitExternal : kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace styx::app
