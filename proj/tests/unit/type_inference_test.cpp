#include <gtest/gtest.h>

#include "synthqa/errors.hpp"
#include "synthqa/qdmr_parser.hpp"
#include "synthqa/type_inference.hpp"

namespace synthqa {
namespace {

TypedProgram typed(std::string_view question, std::string_view qdmr) {
  auto d = make_decomposition("q", std::string(question), qdmr);
  return infer_types(normalize(parse_decomposition(d)), question);
}

TEST(TypeInference, SelectOfQuantityIsNumberScalar) {
  auto tp = typed("What is the number of soldiers in USA?", "return number of soldiers in USA");
  EXPECT_EQ(tp.types[0], ValueType::scalar(Base::kNumber));
}

TEST(TypeInference, SelectOfWhenIsDateScalar) {
  auto tp = typed("When did India get independence?", "return when did India get independence");
  EXPECT_EQ(tp.types[0], ValueType::scalar(Base::kDate));
}

TEST(TypeInference, SelectOfPluralIsEntityList) {
  auto tp = typed("Which countries surround India?", "return countries surrounding India");
  EXPECT_EQ(tp.types[0], ValueType::list(Base::kEntity));
}

TEST(TypeInference, ProjectionOverListIsDictionary) {
  auto tp = typed("How many yards was the longest touchdown?",
                  "return touchdowns ;return yards of #1 ;return the highest of #2");
  EXPECT_EQ(tp.calls[1].primitive, PrimitiveId::kProject);
  EXPECT_EQ(tp.types[1], ValueType::dict(Base::kEntity, Base::kNumber));
  EXPECT_EQ(tp.answer_type(), ValueType::scalar(Base::kNumber));
}

TEST(TypeInference, KeywordHints) {
  auto h = keyword_type_hint(Predicate("number of soldiers in USA"));
  ASSERT_TRUE(h);
  EXPECT_EQ(h->base, Base::kNumber);
  EXPECT_EQ(h->structure, Structure::kScalar);
  EXPECT_EQ(head_noun("touchdowns by Edward"), "touchdowns");
  EXPECT_TRUE(is_plural_noun("touchdowns"));
  EXPECT_FALSE(is_plural_noun("touchdown"));
}

TEST(TypeInference, YearLiteralBecomesDate) {
  auto p = parse_program_text("select(\"battles\") ; project(#1, \"dates of #REF\") ; filter_a_where_b_is_compared_to(#2, \">\", 1805)");
  auto tp = infer_types(p);
  EXPECT_EQ(tp.types[1].base, Base::kDate);
  EXPECT_TRUE(std::get<Value>(tp.calls[2].args[2]).is_date());
}

TEST(TypeInference, ConflictIsReported) {
  auto p = parse_program_text("select(\"when did India get independence\") ; arithmetic_sum(#1, #1) ; list_sum(#2)");
  EXPECT_THROW(infer_types(p), TypeConflict);
}

TEST(TypeInference, EveryTypedStepConformsToSignature) {
  auto tp = typed("How many touchdowns did Edward throw in the 1st quarter?",
                  "return touchdowns by Edward ;return #1 from the 1st quarter ;return number of #2");
  ASSERT_EQ(tp.types.size(), tp.calls.size());
  for (std::size_t i = 0; i < tp.size(); ++i) {
    const auto& out = signature(tp.calls[i].primitive).output;
    EXPECT_TRUE(out.bases & bit(tp.types[i].base)) << i;
  }
}

}  // namespace
}  // namespace synthqa
