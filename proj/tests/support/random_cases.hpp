#pragma once

// Random operand generators for every primitive, shared by the unit tests and
// the acceptance binary. Inputs are drawn from small alphabets so that ties,
// duplicates, missing keys and empty collections all show up.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "synthqa/errors.hpp"
#include "synthqa/fact_store.hpp"
#include "synthqa/interpreter.hpp"
#include "synthqa/reference.hpp"
#include "synthqa/registry.hpp"
#include "synthqa/rng.hpp"

namespace synthqa::testing {

struct RandomCase {
  PrimitiveCall call;
  std::vector<Operand> operands;
  FactStore store;
  ValueType out_type;
};

inline std::string random_entity(Rng& rng, int alphabet = 6) {
  static const char* names[] = {"ABC", "DXE", "FGH", "PQR", "KLO", "MNF", "RST", "UVW"};
  return names[rng.below(static_cast<std::uint64_t>(alphabet))];
}

inline Value random_number(Rng& rng) {
  if (rng.chance(0.5)) return Value::number(rng.uniform_int(0, 12));
  return Value::number(rng.uniform_int(0, 99999) / 100.0);
}

inline Value random_date(Rng& rng) {
  Date d{rng.uniform_int(1995, 2000), 0, 0};
  if (rng.chance(0.6)) {
    d.month = rng.uniform_int(1, 12);
    d.day = rng.uniform_int(1, 28);
  }
  return Value::date(d);
}

inline Value random_scalar(Base b, Rng& rng) {
  switch (b) {
    case Base::kNumber: return random_number(rng);
    case Base::kDate: return random_date(rng);
    case Base::kEntity: return Value::entity(random_entity(rng));
    case Base::kBoolean: return Value::boolean(rng.chance(0.5));
  }
  return Value::number(0);
}

inline List random_list(Base b, Rng& rng, int max_len = 5, bool distinct = false) {
  List out;
  int n = rng.uniform_int(0, max_len);
  for (int i = 0; i < n && i < 200; ++i) {
    Value v = random_scalar(b, rng);
    if (distinct) {
      bool seen = false;
      for (const auto& x : out) seen = seen || x == v;
      if (seen) {
        --i;
        if (out.size() >= 6) break;
        continue;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

inline Base ordered_base(Rng& rng) { return rng.chance(0.5) ? Base::kNumber : Base::kDate; }

// Distinct entity keys and a dictionary over them; occasionally one key is missing.
inline std::pair<List, Dict> keyed(Base value_base, Rng& rng, bool allow_missing = true) {
  List keys = random_list(Base::kEntity, rng, 5, true);
  Dict d;
  for (const auto& k : keys) d.push_back({k, random_scalar(value_base, rng)});
  if (allow_missing && !d.empty() && rng.chance(0.05)) d.erase(d.begin() + static_cast<long>(rng.below(d.size())));
  if (rng.chance(0.3)) d.push_back({Value::entity("ZZZ"), random_scalar(value_base, rng)});
  return {keys, d};
}

inline Dict dict_over(Base value_base, Rng& rng) { return keyed(value_base, rng, false).second; }

inline Comparator random_comparator(Rng& rng) { return static_cast<Comparator>(rng.below(5)); }

inline RandomCase random_case(PrimitiveId prim, Rng& rng) {
  using P = PrimitiveId;
  RandomCase c;
  c.call.primitive = prim;
  c.call.step_index = 1;
  c.out_type = ValueType::list(Base::kEntity);
  auto val = [&](Value v) { c.operands.emplace_back(std::move(v)); };
  auto member = [&](const std::string& pred, const std::string& e) {
    c.store.add(Fact{Predicate(pred), "member", Value::entity(e), std::nullopt, Chain::kGold});
  };
  switch (prim) {
    case P::kSelect: {
      c.call.predicate = Predicate("p");
      int shape = static_cast<int>(rng.below(3));
      if (shape == 2) {
        c.out_type = ValueType::dict(Base::kEntity, Base::kNumber);
        for (const auto& k : random_list(Base::kEntity, rng, 4, true)) {
          c.store.add(Fact{Predicate("p"), "value", k, random_number(rng), Chain::kGold});
        }
      } else {
        c.out_type = shape == 0 ? ValueType::scalar(Base::kEntity) : ValueType::list(Base::kEntity);
        for (int i = rng.uniform_int(0, 3); i > 0; --i) member("p", random_entity(rng));
      }
      member("other", random_entity(rng));
      break;
    }
    case P::kProject: {
      c.call.predicate = Predicate("value of #REF");
      for (int i = 0; i < 6; ++i) {
        if (rng.chance(0.9)) {
          c.store.add(Fact{Predicate("value of #REF"), "value", Value::entity(random_entity(rng)), random_number(rng),
                           Chain::kGold});
        }
      }
      if (rng.chance(0.3)) {
        c.out_type = ValueType::scalar(Base::kNumber);
        val(Value::entity(random_entity(rng)));
      } else {
        c.out_type = ValueType::dict(Base::kEntity, Base::kNumber);
        val(Value::list(random_list(Base::kEntity, rng)));
      }
      break;
    }
    case P::kFilter: {
      c.call.predicate = Predicate("f");
      if (rng.chance(0.95)) {
        for (int i = rng.uniform_int(1, 4); i > 0; --i) member("f", random_entity(rng));
      }
      val(Value::list(random_list(Base::kEntity, rng)));
      break;
    }
    case P::kBoolean: {
      c.call.predicate = Predicate("b");
      c.out_type = ValueType::scalar(Base::kBoolean);
      for (int i = rng.uniform_int(0, 3); i > 0; --i) member("b", random_entity(rng));
      int shape = static_cast<int>(rng.below(3));
      if (shape == 1) val(Value::entity(random_entity(rng)));
      if (shape == 2) val(Value::list(random_list(Base::kEntity, rng, 3)));
      break;
    }
    case P::kCount:
      c.out_type = ValueType::scalar(Base::kNumber);
      if (rng.chance(0.5)) val(Value::list(random_list(Base::kEntity, rng)));
      else val(Value::dict(dict_over(Base::kNumber, rng)));
      break;
    case P::kGroupedCount: {
      c.out_type = ValueType::dict(Base::kEntity, Base::kNumber);
      auto [keys, d] = keyed(Base::kEntity, rng);
      for (auto& e : d) e.value = Value::entity(random_entity(rng, 3));
      val(Value::list(keys));
      val(Value::dict(d));
      break;
    }
    case P::kListSum:
    case P::kListAverage:
    case P::kListMedian:
      c.out_type = ValueType::scalar(Base::kNumber);
      if (rng.chance(0.5)) val(Value::list(random_list(Base::kNumber, rng)));
      else val(Value::dict(dict_over(Base::kNumber, rng)));
      break;
    case P::kListMax:
    case P::kListMin: {
      Base b = ordered_base(rng);
      c.out_type = ValueType::scalar(b);
      if (rng.chance(0.5)) val(Value::list(random_list(b, rng)));
      else val(Value::dict(dict_over(b, rng)));
      break;
    }
    case P::kArithmeticSum:
    case P::kArithmeticDifference:
    case P::kArithmeticAbsoluteDifference:
    case P::kArithmeticMultiplication:
    case P::kArithmeticDivision:
    case P::kArithmeticPercentage:
      c.out_type = ValueType::scalar(Base::kNumber);
      val(random_number(rng));
      val(rng.chance(0.1) ? Value::number(0) : random_number(rng));
      break;
    case P::kFilterCompared: {
      Base b = ordered_base(rng);
      val(Value::dict(dict_over(b, rng)));
      c.operands.emplace_back(random_comparator(rng));
      val(random_scalar(b, rng));
      break;
    }
    case P::kArgmax:
    case P::kArgmin:
    case P::kKthHighest:
    case P::kKthLowest:
    case P::kTopKHighest:
    case P::kTopKLowest:
    case P::kSortKeysByValueAscending:
    case P::kSortKeysByValueDescending: {
      auto [keys, d] = keyed(ordered_base(rng), rng);
      val(Value::list(keys));
      val(Value::dict(d));
      if (prim == P::kKthHighest || prim == P::kKthLowest || prim == P::kTopKHighest || prim == P::kTopKLowest) {
        val(Value::number(rng.uniform_int(0, static_cast<int>(keys.size()) + 1)));
      }
      break;
    }
    case P::kUnion:
    case P::kIntersection:
    case P::kDiscard:
      val(Value::list(random_list(Base::kEntity, rng)));
      val(Value::list(random_list(Base::kEntity, rng)));
      break;
    case P::kSortAscending:
    case P::kSortDescending: {
      Base b = ordered_base(rng);
      c.out_type = ValueType::list(b);
      val(Value::list(random_list(b, rng)));
      break;
    }
    case P::kDateDifferenceInYears:
    case P::kDateDifferenceInMonths:
    case P::kDateDifferenceInDays:
      c.out_type = ValueType::scalar(Base::kNumber);
      val(random_date(rng));
      val(random_date(rng));
      break;
    case P::kExtractYear:
      c.out_type = ValueType::scalar(Base::kNumber);
      val(random_date(rng));
      break;
    case P::kLogicalAnd:
    case P::kLogicalOr:
      c.out_type = ValueType::scalar(Base::kBoolean);
      val(Value::boolean(rng.chance(0.5)));
      val(Value::boolean(rng.chance(0.5)));
      break;
    case P::kLogicalNot:
      c.out_type = ValueType::scalar(Base::kBoolean);
      val(Value::boolean(rng.chance(0.5)));
      break;
    case P::kBooleanComparison: {
      Base b = ordered_base(rng);
      c.out_type = ValueType::scalar(Base::kBoolean);
      val(random_scalar(b, rng));
      c.operands.emplace_back(random_comparator(rng));
      val(random_scalar(b, rng));
      break;
    }
    case P::kExists:
    case P::kIsEmpty:
      c.out_type = ValueType::scalar(Base::kBoolean);
      val(Value::list(random_list(Base::kEntity, rng, 2)));
      break;
    case P::kTakeKth: {
      List l = random_list(Base::kEntity, rng);
      c.out_type = ValueType::scalar(Base::kEntity);
      int n = static_cast<int>(l.size());
      val(Value::list(std::move(l)));
      val(Value::number(rng.uniform_int(0, n + 1)));
      break;
    }
    case P::kSelectLarger:
    case P::kSelectSmaller: {
      Base b = ordered_base(rng);
      c.out_type = ValueType::scalar(b);
      val(random_scalar(b, rng));
      val(rng.chance(0.1) ? std::get<Value>(c.operands.back()) : random_scalar(b, rng));
      break;
    }
    case P::kDictKeys:
    case P::kDictValues:
      val(Value::dict(dict_over(Base::kNumber, rng)));
      break;
    case P::kCopy: break;
  }
  return c;
}

/// Structural equality with a relative tolerance on numbers (summation order may differ).
inline bool values_close(const Value& a, const Value& b) {
  if (a.data.index() != b.data.index()) return false;
  if (a.is_number()) {
    double x = a.as_number();
    double y = b.as_number();
    return std::fabs(x - y) <= 1e-9 * std::max({1.0, std::fabs(x), std::fabs(y)});
  }
  if (a.is_list()) {
    const auto& l = a.as_list();
    const auto& r = b.as_list();
    if (l.size() != r.size()) return false;
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (!values_close(l[i], r[i])) return false;
    }
    return true;
  }
  if (a.is_dict()) {
    const auto& l = a.as_dict();
    const auto& r = b.as_dict();
    if (l.size() != r.size()) return false;
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (!values_close(l[i].key, r[i].key) || !values_close(l[i].value, r[i].value)) return false;
    }
    return true;
  }
  return a == b;
}

/// Value or the error kind raised.
using Outcome = std::variant<Value, ExecErrorKind>;

template <typename Fn>
Outcome outcome_of(Fn&& fn) {
  try {
    return fn();
  } catch (const ExecError& e) {
    return e.kind();
  }
}

inline bool same_outcome(const Outcome& a, const Outcome& b) {
  if (a.index() != b.index()) return false;
  if (const auto* k = std::get_if<ExecErrorKind>(&a)) return *k == std::get<ExecErrorKind>(b);
  return values_close(std::get<Value>(a), std::get<Value>(b));
}

inline std::string describe(const Outcome& o) {
  if (const auto* k = std::get_if<ExecErrorKind>(&o)) return std::string("error ") + to_string(*k);
  return to_string(std::get<Value>(o));
}

inline Outcome run_production(const RandomCase& c) {
  return outcome_of([&] { return eval_primitive(c.call, c.operands, c.store, c.out_type, 1); });
}

inline Outcome run_reference(const RandomCase& c) {
  return outcome_of([&] { return reference::eval_primitive(c.call, c.operands, c.store, c.out_type, 1); });
}

}  // namespace synthqa::testing
