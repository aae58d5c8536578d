#include <gtest/gtest.h>

#include "synthqa/corpus.hpp"
#include "synthqa/errors.hpp"

namespace synthqa {
namespace {

const char* kHeader = "question_id,question_text,decomposition,split\n";
const char* kTouchdown =
    "q1,How many touchdowns did Edward throw in the 1st quarter?,"
    "return touchdowns by Edward ;return #1 from the 1st quarter ;return number of #2,train\n";

TEST(Corpus, SingleEntryGivesOnePattern) {
  IngestStats st;
  auto index = ingest_corpus_text(std::string(kHeader) + kTouchdown, {}, &st);
  ASSERT_EQ(index.size(), 1u);
  EXPECT_EQ(index.histogram(), (std::map<std::string, int>{{"select filter count", 1}}));
  EXPECT_EQ(st.rows, 1);
  EXPECT_EQ(st.admitted, 1);
}

TEST(Corpus, LongDecompositionIsSkipped) {
  std::string qdmr = "return touchdowns";
  for (int i = 1; i < 8; ++i) qdmr += " ;return #" + std::to_string(i) + " in the game " + std::to_string(i);
  IngestStats st;
  auto index = ingest_corpus_text(std::string(kHeader) + "q2,Q?," + qdmr + ",train\n" + kTouchdown, {}, &st);
  EXPECT_EQ(index.size(), 1u);
  EXPECT_EQ(st.skipped_step_range, 1);
}

TEST(Corpus, SingleStepIsBelowRange) {
  IngestStats st;
  auto index = ingest_corpus_text(std::string(kHeader) + "q3,Q?,return touchdowns,train\n", {}, &st);
  EXPECT_TRUE(index.empty());
  EXPECT_EQ(st.skipped_step_range, 1);
}

TEST(Corpus, IngestIsDeterministic) {
  auto path = std::string(SYNTHQA_DATA_DIR) + "/seed_corpus.csv";
  IngestStats a, b;
  EXPECT_EQ(ingest_corpus(path, {}, &a), ingest_corpus(path, {}, &b));
  EXPECT_EQ(a, b);
  EXPECT_GT(a.admitted, 0);
}

TEST(Corpus, MissingColumnIsSchemaError) {
  EXPECT_THROW(ingest_corpus_text("question_id,question_text,split\nq1,Q?,train\n"), SchemaError);
}

TEST(Corpus, MissingFileIsIoError) { EXPECT_THROW(ingest_corpus("/nonexistent/corpus.csv"), IoError); }

TEST(Corpus, TabDelimitedAndColumnMap) {
  std::string text =
      "qid\tq\tqdmr\tpart\n"
      "q1\tHow many touchdowns did Edward throw in the 1st quarter?\t"
      "return touchdowns by Edward ;return #1 from the 1st quarter ;return number of #2\tdev\n";
  EXPECT_EQ(detect_delimiter(text), '\t');
  IngestOptions opts;
  opts.columns = ColumnMap::parse("question_id=qid,question_text=q,decomposition=qdmr,split=part");
  auto index = ingest_corpus_text(text, opts);
  ASSERT_EQ(index.size(), 1u);
  EXPECT_EQ(index.entries()[0].split, "dev");
  EXPECT_THROW(ColumnMap::parse("nonsense=x"), Error);
}

TEST(Corpus, QuotedFields) {
  auto rows = read_delimited("a,\"b, \"\"quoted\"\"\",\"multi\nline\"\n1,2,3\n", ',');
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b, \"quoted\"", "multi\nline"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "2", "3"}));
}

TEST(Corpus, LevelFilter) {
  std::string text = "question_id,question_text,decomposition,split,level\n" + std::string(kTouchdown);
  text.insert(text.size() - 1, ",low");
  IngestOptions opts;
  opts.level_filter = Level::kHigh;
  IngestStats st;
  EXPECT_TRUE(ingest_corpus_text(text, opts, &st).empty());
  EXPECT_EQ(st.skipped_level, 1);
  opts.level_filter = Level::kLow;
  EXPECT_EQ(ingest_corpus_text(text, opts).size(), 1u);
}

TEST(Corpus, UnparseableRowsAreCounted) {
  IngestStats st;
  auto index =
      ingest_corpus_text(std::string(kHeader) + "q9,Q?,return touchdowns ;return #4 of it,train\n" + kTouchdown, {},
                         &st);
  EXPECT_EQ(index.size(), 1u);
  EXPECT_EQ(st.rows, 2);
  EXPECT_EQ(st.failure_kinds.size(), 1u);
}

TEST(Corpus, PredicatePoolCoversGroundingSteps) {
  auto index = ingest_corpus_text(std::string(kHeader) + kTouchdown);
  auto pool = predicate_pool(index);
  EXPECT_EQ(pool.size(), 2u);
}

}  // namespace
}  // namespace synthqa
