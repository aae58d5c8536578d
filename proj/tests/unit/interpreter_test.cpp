#include <gtest/gtest.h>

#include "support/random_cases.hpp"
#include "synthqa/qdmr_parser.hpp"
#include "synthqa/type_inference.hpp"

namespace synthqa {
namespace {

using testing::RandomCase;

Value ents(std::initializer_list<const char*> names) {
  List l;
  for (const char* n : names) l.push_back(Value::entity(n));
  return Value::list(std::move(l));
}

Value eval(PrimitiveId prim, std::vector<Operand> ops, ValueType out = ValueType::list(Base::kEntity),
           const FactStore& store = {}) {
  PrimitiveCall call;
  call.primitive = prim;
  call.step_index = 1;
  return eval_primitive(call, ops, store, out, 1);
}

TEST(Interpreter, AgreesWithReferenceOnRandomInputs) {
  for (const auto& sig : registry()) {
    Rng rng(derive_seed(11, sig.name, 0));
    int errors = 0;
    for (int i = 0; i < 300; ++i) {
      RandomCase c = testing::random_case(sig.primitive, rng);
      auto prod = testing::run_production(c);
      auto ref = testing::run_reference(c);
      ASSERT_TRUE(testing::same_outcome(prod, ref))
          << sig.name << " case " << i << ": " << testing::describe(prod) << " vs " << testing::describe(ref);
      errors += std::holds_alternative<ExecErrorKind>(prod);
    }
    EXPECT_LT(errors, 300) << sig.name << " never produced a value";
  }
}

TEST(Interpreter, SetLaws) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    List xs = testing::random_list(Base::kEntity, rng, 5, true);
    Value x = Value::list(xs);
    Value empty = Value::list({});
    EXPECT_EQ(eval(PrimitiveId::kUnion, {x, empty}), x);
    EXPECT_EQ(eval(PrimitiveId::kIntersection, {x, x}), x);
    EXPECT_EQ(eval(PrimitiveId::kDiscard, {x, empty}), x);
    EXPECT_EQ(eval(PrimitiveId::kDiscard, {x, x}), empty);
  }
}

TEST(Interpreter, ComparatorDuality) {
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    Dict d = testing::dict_over(Base::kNumber, rng);
    Value thr = testing::random_number(rng);
    Comparator c = testing::random_comparator(rng);
    if (c == Comparator::kEq) continue;
    auto kept = eval(PrimitiveId::kFilterCompared, {Value::dict(d), c, thr}).as_list();
    auto rest = eval(PrimitiveId::kFilterCompared, {Value::dict(d), complement(c), thr}).as_list();
    EXPECT_EQ(kept.size() + rest.size(), d.size());
    for (const auto& k : kept) EXPECT_EQ(std::count(rest.begin(), rest.end(), k), 0);
  }
}

TEST(Interpreter, CountOfEmptyListIsZero) {
  EXPECT_EQ(eval(PrimitiveId::kCount, {Value::list({})}, ValueType::scalar(Base::kNumber)), Value::number(0));
}

TEST(Interpreter, DifferenceOfEqualNumbersIsZero) {
  EXPECT_EQ(eval(PrimitiveId::kArithmeticDifference, {Value::number(10), Value::number(10)},
                 ValueType::scalar(Base::kNumber)),
            Value::number(0));
}

TEST(Interpreter, GroupedCountTallies) {
  Dict d{{Value::entity("ABC"), Value::entity("RED")},
         {Value::entity("DXE"), Value::entity("BLU")},
         {Value::entity("FGH"), Value::entity("RED")}};
  auto out = eval(PrimitiveId::kGroupedCount, {ents({"ABC", "DXE", "FGH"}), Value::dict(d)},
                  ValueType::dict(Base::kEntity, Base::kNumber));
  Dict want{{Value::entity("RED"), Value::number(2)}, {Value::entity("BLU"), Value::number(1)}};
  EXPECT_EQ(out, Value::dict(want));
}

TEST(Interpreter, FilterComparedKeepsLargerValue) {
  Dict d{{Value::entity("AFE"), Value::number(871781)}, {Value::entity("RQX"), Value::number(989517.24)}};
  auto out = eval(PrimitiveId::kFilterCompared, {Value::dict(d), Comparator::kGt, Value::number(948768.92)});
  EXPECT_EQ(out, ents({"RQX"}));
}

TEST(Interpreter, ArgmaxKeepsTies) {
  Dict d{{Value::entity("ABC"), Value::number(3)},
         {Value::entity("DXE"), Value::number(5)},
         {Value::entity("FGH"), Value::number(5)}};
  EXPECT_EQ(eval(PrimitiveId::kArgmax, {ents({"ABC", "DXE", "FGH"}), Value::dict(d)}), ents({"DXE", "FGH"}));
  EXPECT_EQ(eval(PrimitiveId::kKthHighest, {ents({"ABC", "DXE", "FGH"}), Value::dict(d), Value::number(2)}),
            ents({"ABC"}));
}

TEST(Interpreter, ErrorKinds) {
  auto kind = [](auto fn) {
    try {
      fn();
    } catch (const ExecError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error";
    return ExecErrorKind::kOutOfRange;
  };
  auto num = ValueType::scalar(Base::kNumber);
  EXPECT_EQ(kind([&] { eval(PrimitiveId::kArithmeticDivision, {Value::number(1), Value::number(0)}, num); }),
            ExecErrorKind::kDivisionByZero);
  EXPECT_EQ(kind([&] { eval(PrimitiveId::kListAverage, {Value::list({})}, num); }), ExecErrorKind::kEmptyAggregation);
  EXPECT_EQ(kind([&] { eval(PrimitiveId::kTakeKth, {ents({"ABC"}), Value::number(2)}, num); }),
            ExecErrorKind::kOutOfRange);
  EXPECT_EQ(kind([&] { eval(PrimitiveId::kCount, {Value::number(3)}, num); }), ExecErrorKind::kRuntimeTypeMismatch);
  PrimitiveCall sel;
  sel.primitive = PrimitiveId::kSelect;
  sel.predicate = Predicate("touchdowns");
  EXPECT_EQ(kind([&] { eval_primitive(sel, {}, FactStore{}, ValueType::list(Base::kEntity)); }),
            ExecErrorKind::kMissingGrounding);
}

TEST(Interpreter, ExecutesTouchdownProgram) {
  auto p = parse_program_text(R"(select("touchdowns by Edward") ; filter(#1, "from the 1st quarter") ; count(#2))");
  auto tp = infer_types(p);
  FactStore s;
  auto add = [&](const char* pred, const char* e) {
    s.add(Fact{Predicate(pred), "member", Value::entity(e), std::nullopt, Chain::kGold});
  };
  for (auto e : {"ABC", "DXE", "FGH"}) add("touchdowns by Edward", e);
  for (auto e : {"ABC", "FGH", "PQR"}) add("from the 1st quarter", e);
  auto steps = execute_steps(tp, s);
  EXPECT_EQ(steps[1], ents({"ABC", "FGH"}));
  EXPECT_EQ(steps[2], Value::number(2));
  EXPECT_EQ(reference::execute_steps(tp, s), steps);
}

}  // namespace
}  // namespace synthqa
