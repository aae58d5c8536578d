#include <gtest/gtest.h>

#include <cmath>

#include "synthqa/errors.hpp"
#include "synthqa/perturb.hpp"

namespace synthqa {
namespace {

TEST(Perturb, NeverReturnsOriginal) {
  PredicatePool pool;
  pool.add(Predicate("yards of passing touchdowns"), ValueType::list(Base::kNumber));
  pool.add(Predicate("yards of field goals"), ValueType::list(Base::kNumber));
  Rng rng(1);
  for (auto text : {"touchdowns by Edward", "goals in 1995", "passes in the 2nd quarter", "yards of rushing touchdowns",
                    "points of 30 yards"}) {
    Predicate p(text);
    for (int i = 0; i < 1000; ++i) {
      auto out = perturb_predicate(p, ValueType::list(Base::kNumber), pool, rng);
      EXPECT_NE(out.predicate, p) << text;
    }
  }
}

TEST(Perturb, NumbersStayWithinTwentyPercent) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    int n = rng.uniform_int(5, 5000);
    auto s = swap_mention_text(std::to_string(n), MentionKind::kNumber, rng);
    double v = std::stod(s);
    EXPECT_NE(v, n);
    EXPECT_LE(std::fabs(v - n), 0.2 * n + 1e-9) << n << " -> " << s;
  }
}

TEST(Perturb, YearsShiftByOneToFive) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    int y = rng.uniform_int(1200, 2000);
    int out = std::stoi(swap_mention_text(std::to_string(y), MentionKind::kDate, rng));
    int shift = std::abs(out - y);
    EXPECT_GE(shift, 1);
    EXPECT_LE(shift, 5);
  }
}

TEST(Perturb, OrdinalsMoveToNeighbour) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    auto s = swap_mention_text("2nd", MentionKind::kOrdinal, rng);
    EXPECT_TRUE(s == "1st" || s == "3rd") << s;
  }
}

TEST(Perturb, EntityMentionIsSwapped) {
  Rng rng(5);
  auto out = perturb_predicate(Predicate("touchdowns by Edward"), ValueType::list(Base::kEntity), {}, rng);
  EXPECT_EQ(out.mechanism, PerturbMechanism::kEntitySwap);
  EXPECT_TRUE(out.predicate.text().starts_with("touchdowns by "));
  EXPECT_EQ(out.predicate.text().find("Edward"), std::string::npos);
}

TEST(Perturb, RetrievesSimilarPredicateWithoutMentions) {
  PredicatePool pool;
  pool.add(Predicate("yards of passing touchdowns"), ValueType::list(Base::kNumber));
  pool.add(Predicate("names of players"), ValueType::list(Base::kEntity));
  Rng rng(6);
  auto out = perturb_predicate(Predicate("yards of rushing touchdowns"), ValueType::list(Base::kNumber), pool, rng);
  EXPECT_EQ(out.mechanism, PerturbMechanism::kRetrievedPredicate);
  EXPECT_EQ(out.predicate.text(), "yards of passing touchdowns");
}

TEST(Perturb, RetrievalRespectsTypeAndPrimitive) {
  PredicatePool pool;
  pool.add(Predicate("yards of passing touchdowns"), ValueType::list(Base::kEntity));
  Rng rng(7);
  EXPECT_THROW(perturb_predicate(Predicate("yards of rushing touchdowns"), ValueType::list(Base::kNumber), pool, rng),
               PoolExhausted);
  PredicatePool typed;
  typed.add(Predicate("yards of passing touchdowns"), ValueType::list(Base::kNumber), PrimitiveId::kFilter);
  EXPECT_THROW(perturb_predicate(Predicate("yards of rushing touchdowns"), ValueType::list(Base::kNumber), typed, rng,
                                 PrimitiveId::kSelect),
               PoolExhausted);
}

TEST(Perturb, ExhaustedPoolThrows) {
  Rng rng(8);
  EXPECT_THROW(perturb_predicate(Predicate("touchdowns"), ValueType::list(Base::kEntity), {}, rng), PoolExhausted);
}

TEST(Perturb, WordOverlap) {
  EXPECT_DOUBLE_EQ(word_overlap("yards of rushing touchdowns", "yards of passing touchdowns"), 0.75);
  EXPECT_DOUBLE_EQ(word_overlap("a b", "c d"), 0.0);
  EXPECT_DOUBLE_EQ(word_overlap("Yards", "yards"), 1.0);
}

}  // namespace
}  // namespace synthqa
