#include <gtest/gtest.h>

#include <sstream>

#include "styx/app/config.hpp"

using namespace styx;
using namespace styx::app;

TEST(Config, DefaultsMatchDocumentedValues) {
  RunConfig cfg;
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.train.folds, 5u);
  EXPECT_EQ(cfg.gen.n_samples, 1000u);
  EXPECT_EQ(cfg.gen.max_words, 20);
  EXPECT_EQ(cfg.gen.model, "gpt-4");
  EXPECT_DOUBLE_EQ(cfg.gen.temperature, 1.0);
  EXPECT_EQ(cfg.top_k, 20u);
}

TEST(Config, ParsesKeyValueLines) {
  RunConfig cfg;
  apply_config_text(cfg,
                    "# comment\n"
                    "seed = 7\n"
                    "\n"
                    "  top_k=5  \n"
                    "strict = yes\n"
                    "llm.temperature = 0.25\n"
                    "llm.topics = Arts, Religion\n"
                    "metrics = noun_rate,verb_rate\n",
                    "/base");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.top_k, 5u);
  EXPECT_TRUE(cfg.strict);
  EXPECT_DOUBLE_EQ(cfg.gen.temperature, 0.25);
  EXPECT_EQ(cfg.gen.topics, (std::vector<std::string>{"Arts", "Religion"}));
  EXPECT_EQ(cfg.metric_list(), (std::vector<std::string>{"noun_rate", "verb_rate"}));
}

TEST(Config, RelativePathsResolveAgainstBase) {
  RunConfig cfg;
  apply_config_text(cfg, "corpus = data/blogs.csv\nmodel = /abs/m.styx\n", "/srv/run");
  EXPECT_EQ(cfg.corpus, std::filesystem::path("/srv/run/data/blogs.csv"));
  EXPECT_EQ(cfg.model, std::filesystem::path("/abs/m.styx"));
}

TEST(Config, UnknownKeyNamesLineAndKey) {
  RunConfig cfg;
  try {
    apply_config_text(cfg, "seed = 1\nsede = 2\n", "/");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Input);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("sede"), std::string::npos) << msg;
  }
}

TEST(Config, MalformedValuesAreInputErrors) {
  RunConfig cfg;
  EXPECT_THROW(apply_config_text(cfg, "seed = -3\n", "/"), Error);
  EXPECT_THROW(apply_config_text(cfg, "strict = maybe\n", "/"), Error);
  EXPECT_THROW(apply_config_text(cfg, "llm.temperature = warm\n", "/"), Error);
  EXPECT_THROW(apply_config_text(cfg, "just words\n", "/"), Error);
}

TEST(Config, FinalizeRejectsUnknownMetric) {
  RunConfig cfg;
  cfg.metrics = {"noun_rate", "not_a_metric"};
  EXPECT_THROW(finalize_config(cfg), Error);
}

TEST(Config, FinalizeMakesPathsAbsolute) {
  RunConfig cfg;
  cfg.out_dir = "out";
  finalize_config(cfg);
  EXPECT_TRUE(cfg.out_dir.is_absolute());
  EXPECT_EQ(cfg.model_path(), cfg.out_dir / "model.styx");
}

TEST(Config, EffectiveConfigListsEveryKeyAndRoundTrips) {
  RunConfig cfg;
  apply_config_text(cfg, "seed = 9\nlabel_b = synthetic\nllm.topics = A,B\n", "/");
  finalize_config(cfg);
  std::ostringstream out;
  write_effective_config(out, cfg);
  const std::string text = out.str();
  for (const auto& key : config_keys()) EXPECT_NE(text.find(key + " = "), std::string::npos) << key;

  RunConfig again;
  apply_config_text(again, text, "/");
  std::ostringstream out2;
  write_effective_config(out2, again);
  EXPECT_EQ(text, out2.str());
}
