#include <gtest/gtest.h>

#include <regex>
#include <set>

#include "synthqa/errors.hpp"
#include "synthqa/qdmr_parser.hpp"
#include "synthqa/reference.hpp"
#include "synthqa/teacher.hpp"
#include "synthqa/type_inference.hpp"

namespace synthqa {
namespace {

PrimitiveProblem compared_example() {
  PrimitiveProblem p;
  p.primitive = PrimitiveId::kFilterCompared;
  p.program = infer_types(parse_program_text(
      R"(select("entities") ; project(#1, "value") ; filter_a_where_b_is_compared_to(#2, ">", 948768.92))"));
  auto hidden = [&](const char* e) {
    p.store.add(Fact{Predicate("entities"), std::string(kHiddenFamily), Value::entity(e), std::nullopt, Chain::kGold});
  };
  auto value = [&](const char* e, double v) {
    p.store.add(Fact{Predicate("value"), "teacher_value", Value::entity(e), Value::number(v), Chain::kGold});
  };
  hidden("AFE");
  hidden("RQX");
  value("AFE", 871781);
  value("RQX", 989517.24);
  p.grouped = {false, false, false, true};
  p.slots = {{"cmp", "larger than"}, {"thr", "948768.92"}};
  return p;
}

TEST(Teacher, ComparedExample) {
  auto inst = render_primitive_problem(compared_example(), 0);
  EXPECT_EQ(inst.question, "Entities that have value larger than 948768.92?");
  EXPECT_EQ(inst.context, "Entity AFE has value 871781. Entity RQX has value 989,517.24.");
  EXPECT_EQ(inst.answers, std::vector<std::string>{"RQX"});
  EXPECT_EQ(inst.pattern, "filter_a_where_b_is_compared_to");
  EXPECT_EQ(inst.num_facts, 2);
}

TEST(Teacher, CountCanBeZero) {
  bool found = false;
  for (std::uint64_t s = 0; s < 2000 && !found; ++s) {
    Rng rng(s);
    auto p = sample_primitive_problem(PrimitiveId::kCount, rng);
    auto inst = render_primitive_problem(p, 0);
    if (inst.answers == std::vector<std::string>{"0"}) {
      found = true;
      EXPECT_EQ(execute_steps(p.program, p.store).back(), Value::number(0));
    }
  }
  EXPECT_TRUE(found);
}

std::set<std::string> context_tokens(const std::string& context) {
  static const std::regex token(R"([A-Z]{3}\b|\b[A-Z]\b|\d[\d,]*(?:\.\d+)?)");
  std::set<std::string> out;
  for (std::sregex_iterator it(context.begin(), context.end(), token), end; it != end; ++it) {
    std::string t = it->str();
    t.erase(std::remove(t.begin(), t.end(), ','), t.end());
    out.insert(t);
  }
  return out;
}

TEST(Teacher, EveryPrimitiveAgreesWithOracleAndHasDistractors) {
  for (const auto& sig : registry()) {
    int n = 0;
    generate_primitive_instances(sig.primitive, 100, 0, 17, [&](const QAInstance& inst) {
      ++n;
      EXPECT_EQ(inst.pattern, sig.name);
      EXPECT_EQ(inst.id, std::string(sig.name) + "-train-" + std::to_string(n - 1));
      EXPECT_FALSE(inst.question.empty());
      Rng rng(inst.seed);
      auto p = sample_primitive_problem(sig.primitive, rng);
      auto oracle = reference::execute_steps(p.program, p.store).back();
      EXPECT_EQ(answer_strings(oracle), inst.answers) << inst.id;
      std::set<std::string> answers(inst.answers.begin(), inst.answers.end());
      bool distractor = false;
      for (const auto& t : context_tokens(inst.context)) distractor = distractor || !answers.count(t);
      EXPECT_TRUE(distractor) << inst.id << ": " << inst.context;
      for (const auto& f : p.store.facts()) {
        for (const auto* v : {&f.subject, f.object ? &*f.object : nullptr}) {
          if (!v) continue;
          if (v->is_entity()) EXPECT_TRUE(is_valid_entity_name(v->as_entity()));
          if (v->is_number()) EXPECT_NO_THROW(make_number(v->as_number()));
          if (v->is_date()) EXPECT_NO_THROW(make_date(v->as_date()));
        }
      }
    });
    EXPECT_EQ(n, 100);
  }
}

TEST(Teacher, SplitsAndDeterminism) {
  std::vector<std::string> a, b;
  generate_primitive_instances(PrimitiveId::kArgmax, 3, 2, 5, [&](const QAInstance& i) { a.push_back(i.id + i.context); });
  generate_primitive_instances(PrimitiveId::kArgmax, 3, 2, 5, [&](const QAInstance& i) { b.push_back(i.id + i.context); });
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 5u);
  EXPECT_TRUE(a[3].starts_with("argmax-dev-0"));
}

TEST(Teacher, MissingTemplateThrows) {
  auto empty = TemplateSet::from_text("teacher_value\tEntity {entity} has value {value}.\n");
  EXPECT_THROW(generate_primitive_instances(PrimitiveId::kCount, 1, 0, 1, [](const QAInstance&) {}, empty), NoTemplate);
  EXPECT_THROW(render_primitive_problem(compared_example(), 0, empty), NoTemplate);
}

}  // namespace
}  // namespace synthqa
