#include <gtest/gtest.h>

#include <set>

#include "support/skewed_corpus.hpp"
#include "synthqa/checker.hpp"
#include "synthqa/dataset.hpp"
#include "synthqa/errors.hpp"

namespace synthqa {
namespace {

const std::string kSeedCorpus = std::string(SYNTHQA_DATA_DIR) + "/seed_corpus.csv";

std::vector<GeneratedInstance> run(const PatternIndex& corpus, const DatasetConfig& cfg, DatasetStats* stats = nullptr) {
  std::vector<GeneratedInstance> out;
  auto st = generate_dataset(corpus, cfg, [&](const GeneratedInstance& g) { out.push_back(g); });
  if (stats) *stats = st;
  return out;
}

TEST(Dataset, EmptyCorpusThrows) {
  DatasetConfig cfg;
  EXPECT_THROW(generate_dataset(PatternIndex{}, cfg, [](const GeneratedInstance&) {}), CorpusEmpty);
}

TEST(Dataset, StopsAtTargetSize) {
  auto corpus = ingest_corpus(kSeedCorpus);
  DatasetConfig cfg;
  cfg.target_size = 137;
  DatasetStats st;
  auto out = run(corpus, cfg, &st);
  EXPECT_EQ(out.size(), 137u);
  EXPECT_EQ(st.accepted, 137u);
  EXPECT_EQ(st.train + st.dev, 137u);
  std::uint64_t total = 0;
  for (const auto& [p, n] : st.pattern_counts) total += n;
  EXPECT_EQ(total, 137u);
  EXPECT_GT(st.acceptance_rate(), 0.0);
  EXPECT_LE(st.acceptance_rate(), 1.0);
}

TEST(Dataset, SinglePatternBalancedEqualsUnbalanced) {
  auto corpus = ingest_corpus_text(testing::skewed_corpus_text(kSeedCorpus, 1, 1.0, 5));
  ASSERT_EQ(corpus.patterns().size(), 1u);
  DatasetConfig cfg;
  cfg.target_size = 50;
  DatasetStats balanced, unbalanced;
  run(corpus, cfg, &balanced);
  cfg.balanced = false;
  run(corpus, cfg, &unbalanced);
  EXPECT_EQ(balanced.pattern_counts, unbalanced.pattern_counts);
}

TEST(Dataset, BalancedSamplingIsUniformOverPatterns) {
  const int k = 20;
  auto corpus = ingest_corpus_text(testing::skewed_corpus_text(kSeedCorpus, k, 0.7, 400));
  ASSERT_EQ(corpus.patterns().size(), static_cast<std::size_t>(k));
  DatasetConfig cfg;
  cfg.target_size = 4000;
  cfg.seed = 21;
  DatasetStats st;
  run(corpus, cfg, &st);
  ASSERT_EQ(st.pattern_counts.size(), static_cast<std::size_t>(k));
  double expected = static_cast<double>(cfg.target_size) / k;
  double chi2 = 0;
  for (const auto& [p, n] : st.pattern_counts) chi2 += (n - expected) * (n - expected) / expected;
  // 99.9th percentile of chi-square with 19 degrees of freedom.
  EXPECT_LT(chi2, 43.82);
  EXPECT_NEAR(st.top10_share(), 0.5, 0.05);

  cfg.balanced = false;
  DatasetStats skewed;
  run(corpus, cfg, &skewed);
  EXPECT_GT(skewed.top10_share(), 0.8);
}

TEST(Dataset, QuestionEntitySwap) {
  std::string q = "How many touchdowns did Edward throw in the 1st quarter?";
  std::set<std::string> seen;
  for (std::uint64_t s = 0; s < 400; ++s) {
    Rng rng(s);
    seen.insert(perturb_question_entities(q, rng, 1.0));
  }
  EXPECT_TRUE(seen.count("How many touchdowns did Tom throw in the 1st quarter?"));
  EXPECT_FALSE(seen.count(q));
  Rng rng(1);
  EXPECT_EQ(perturb_question_entities(q, rng, 0.0), q);
}

TEST(Dataset, QuestionWithoutMentionsIsUnchanged) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(perturb_question_entities("how many touchdowns were thrown?", rng, 1.0),
              "how many touchdowns were thrown?");
  }
}

TEST(Dataset, SubstitutionIsWholeToken) {
  EXPECT_EQ(apply_substitution("Edward and Edwards met Edward.", {"Edward", "Tom"}), "Tom and Edwards met Tom.");
}

TEST(Dataset, RequestSubstitutionReachesPredicates) {
  auto corpus = ingest_corpus(kSeedCorpus);
  const auto& e = corpus.entries()[0];
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    GenerationRequest req{e.decomposition.question_text, e.decomposition.question_id, "", e.program};
    auto sub = perturb_request_entities(req, rng, 1.0);
    ASSERT_TRUE(sub);
    EXPECT_NE(req.question.find(sub->replacement), std::string::npos);
    bool in_predicate = false;
    for (const auto& c : req.program.calls) {
      if (c.predicate) {
        EXPECT_EQ(c.predicate->text().find(sub->original + " "), std::string::npos);
        in_predicate = in_predicate || c.predicate->text().find(sub->replacement) != std::string::npos;
      }
    }
    EXPECT_TRUE(in_predicate);
  }
}

TEST(Dataset, PerturbedQuestionsStayConsistent) {
  auto corpus = ingest_corpus(kSeedCorpus);
  DatasetConfig cfg;
  cfg.target_size = 500;
  cfg.entity_perturb_probability = 1.0;
  cfg.seed = 8;
  DatasetStats st;
  auto out = run(corpus, cfg, &st);
  ASSERT_EQ(out.size(), 500u);
  EXPECT_GT(st.entity_perturbed, 250u);
  for (const auto& g : out) {
    auto values = execute_steps(g.instance.program, g.facts);
    EXPECT_EQ(answer_strings(values.back()), g.instance.answers) << g.instance.id;
    EXPECT_TRUE(check_instance(g.instance, g.facts).pass()) << g.instance.id;
  }
}

TEST(Dataset, SplitHygiene) {
  auto corpus = ingest_corpus(kSeedCorpus);
  DatasetConfig cfg;
  cfg.target_size = 600;
  cfg.dev_fraction = 0.3;
  DatasetStats st;
  auto out = run(corpus, cfg, &st);
  std::set<std::string> ids, train_q, dev_q;
  for (const auto& g : out) {
    EXPECT_TRUE(ids.insert(g.instance.id).second) << g.instance.id;
    EXPECT_EQ(g.instance.split == "dev", in_dev_split(g.instance.question_id, cfg.dev_fraction));
    (g.instance.split == "dev" ? dev_q : train_q).insert(g.instance.question_id);
  }
  for (const auto& q : dev_q) EXPECT_FALSE(train_q.count(q)) << q;
  EXPECT_GT(st.dev, 0u);
  EXPECT_GT(st.train, st.dev);
}

TEST(Dataset, DevSplitFraction) {
  int dev = 0;
  for (int i = 0; i < 10000; ++i) dev += in_dev_split("q" + std::to_string(i), 0.1);
  EXPECT_NEAR(dev / 10000.0, 0.1, 0.01);
  EXPECT_FALSE(in_dev_split("anything", 0.0));
  EXPECT_TRUE(in_dev_split("anything", 1.0));
}

TEST(Dataset, OutputIndependentOfWorkers) {
  auto corpus = ingest_corpus(kSeedCorpus);
  DatasetConfig cfg;
  cfg.target_size = 300;
  cfg.seed = 7;
  auto one = run(corpus, cfg);
  cfg.workers = 4;
  auto four = run(corpus, cfg);
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].instance.id, four[i].instance.id);
    EXPECT_EQ(one[i].instance.context, four[i].instance.context);
  }
}

}  // namespace
}  // namespace synthqa
