#include <gtest/gtest.h>

#include "support/touchdown_example.hpp"
#include "synthqa/checker.hpp"
#include "synthqa/errors.hpp"
#include "synthqa/interpreter.hpp"

namespace synthqa {
namespace {

using testing::touchdown_instance;
using testing::touchdown_store;

Fact member(const char* pred, const char* e) {
  return Fact{Predicate(pred), "select", Value::entity(e), std::nullopt, Chain::kGold};
}

TEST(Checker, TouchdownPasses) {
  auto inst = touchdown_instance();
  auto store = touchdown_store();
  EXPECT_EQ(execute_steps(inst.program, store).back(), Value::number(2));
  auto contrast = inst.perturbation.apply(inst.program);
  EXPECT_EQ(execute_steps(contrast, store).back(), Value::number(1));
  auto report = check_instance(inst, store);
  EXPECT_TRUE(report.p1.pass) << report.p1.detail;
  EXPECT_TRUE(report.p2.pass) << report.p2.detail;
  EXPECT_TRUE(report.p3.pass) << report.p3.detail;
  EXPECT_TRUE(report.pass());
}

TEST(Checker, FilterCoveringEveryMemberFailsP1) {
  auto inst = touchdown_instance();
  FactStore store;
  for (auto e : {"ABC", "DXE", "FGH", "PQR"}) store.add(member("touchdowns by Edward", e));
  for (auto e : {"ABC", "DXE"}) store.add(member("from the 1st quarter", e));
  auto r = check_p1(inst, store);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.violating_steps, std::vector<int>{2});
}

TEST(Checker, FilterKeepingWholeInputFailsP2) {
  auto inst = touchdown_instance();
  FactStore store;
  for (auto e : {"ABC", "DXE"}) store.add(member("touchdowns by Edward", e));
  for (auto e : {"ABC", "DXE", "MNF"}) store.add(member("from the 1st quarter", e));
  EXPECT_TRUE(check_p1(inst, store).pass);
  auto r = check_p2(inst, store);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.violating_steps, std::vector<int>{2});
}

TEST(Checker, ContrastiveAnswerEqualToGoldFailsP3) {
  auto inst = touchdown_instance();
  auto store = touchdown_store();
  store.add(member("touchdowns by Tom", "RST"));
  EXPECT_FALSE(check_p3(inst, store).pass);
}

TEST(Checker, DegeneratePerturbationFailsP3) {
  auto inst = touchdown_instance();
  for (auto& s : inst.perturbation.steps) {
    if (s) s->perturbed = s->original;
  }
  EXPECT_FALSE(check_p3(inst, touchdown_store()).pass);
}

TEST(Checker, MissingPerturbationRecord) {
  auto inst = touchdown_instance();
  inst.perturbation.steps.assign(3, std::nullopt);
  EXPECT_THROW(check_p3(inst, touchdown_store()), MissingPerturbationRecord);
  auto r = check_instance(inst, touchdown_store());
  EXPECT_FALSE(r.p3.pass);
  EXPECT_FALSE(r.pass());
}

TEST(Checker, WrongStoredAnswerIsCaught) {
  auto inst = touchdown_instance();
  inst.answers = {"3"};
  EXPECT_FALSE(check_instance(inst, touchdown_store()).answers_match);
}

TEST(Checker, UngroundedProgramFails) {
  auto inst = touchdown_instance();
  FactStore empty;
  EXPECT_FALSE(check_p1(inst, empty).pass);
  EXPECT_FALSE(check_p2(inst, empty).pass);
}

}  // namespace
}  // namespace synthqa
