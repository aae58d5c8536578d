#include "synthqa/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "synthqa/errors.hpp"

namespace synthqa {

std::vector<Operand> resolve_operands(const PrimitiveCall& call, std::span<const Value> steps) {
  std::vector<Operand> out;
  out.reserve(call.args.size());
  for (const auto& a : call.args) {
    if (const auto* r = std::get_if<StepRef>(&a)) {
      out.emplace_back(steps[static_cast<std::size_t>(r->step - 1)]);
    } else if (const auto* c = std::get_if<Comparator>(&a)) {
      out.emplace_back(*c);
    } else {
      out.emplace_back(std::get<Value>(a));
    }
  }
  return out;
}

namespace {

using Kind = ExecErrorKind;

struct Evaluator {
  const PrimitiveCall& call;
  std::span<const Operand> ops;
  const FactStore& store;
  const ValueType& out_type;
  int step;

  [[noreturn]] void fail(Kind k, const std::string& detail = {}) const { throw ExecError(k, step, detail); }

  const Value& value(std::size_t i) const {
    if (i >= ops.size()) fail(Kind::kRuntimeTypeMismatch, "missing operand");
    const auto* v = std::get_if<Value>(&ops[i]);
    if (!v) fail(Kind::kRuntimeTypeMismatch, "expected a value operand");
    return *v;
  }
  Comparator comparator(std::size_t i) const {
    const auto* c = i < ops.size() ? std::get_if<Comparator>(&ops[i]) : nullptr;
    if (!c) fail(Kind::kRuntimeTypeMismatch, "expected a comparator");
    return *c;
  }
  const List& list(std::size_t i) const {
    const auto& v = value(i);
    if (!v.is_list()) fail(Kind::kRuntimeTypeMismatch, "expected a list");
    return v.as_list();
  }
  const Dict& dict(std::size_t i) const {
    const auto& v = value(i);
    if (!v.is_dict()) fail(Kind::kRuntimeTypeMismatch, "expected a dictionary");
    return v.as_dict();
  }
  double number(std::size_t i) const {
    const auto& v = value(i);
    if (!v.is_number()) fail(Kind::kRuntimeTypeMismatch, "expected a number");
    return v.as_number();
  }
  const Date& date(std::size_t i) const {
    const auto& v = value(i);
    if (!v.is_date()) fail(Kind::kRuntimeTypeMismatch, "expected a date");
    return v.as_date();
  }
  bool boolean(std::size_t i) const {
    const auto& v = value(i);
    if (!v.is_boolean()) fail(Kind::kRuntimeTypeMismatch, "expected a boolean");
    return v.as_boolean();
  }
  std::size_t k(std::size_t i) const { return static_cast<std::size_t>(number(i)); }
  const std::string& pred() const { return call.predicate->text(); }

  // Elements of a list, or values of a dictionary.
  List elements(std::size_t i) const {
    const auto& v = value(i);
    if (v.is_list()) return v.as_list();
    if (!v.is_dict()) fail(Kind::kRuntimeTypeMismatch, "expected a collection");
    List out;
    out.reserve(v.as_dict().size());
    for (const auto& e : v.as_dict()) out.push_back(e.value);
    return out;
  }

  std::strong_ordering cmp(const Value& a, const Value& b) const {
    if (a.scalar_base() != b.scalar_base() || !a.scalar_base() || a.is_boolean()) {
      fail(Kind::kRuntimeTypeMismatch, "incomparable values");
    }
    return compare_scalars(a, b);
  }

  std::unordered_map<std::string, const Value*> lookup(const Dict& d) const {
    std::unordered_map<std::string, const Value*> m;
    for (const auto& e : d) m.emplace(scalar_key(e.key), &e.value);
    return m;
  }

  // Values from d for each element of keys, in key order.
  std::vector<const Value*> values_for(const List& keys, const Dict& d) const {
    auto m = lookup(d);
    std::vector<const Value*> out;
    out.reserve(keys.size());
    for (const auto& key : keys) {
      auto it = m.find(scalar_key(key));
      if (it == m.end()) fail(Kind::kRuntimeTypeMismatch, "key " + to_string(key) + " not in dictionary");
      out.push_back(it->second);
    }
    return out;
  }

  static std::unordered_set<std::string> key_set(const List& l) {
    std::unordered_set<std::string> s;
    for (const auto& v : l) s.insert(scalar_key(v));
    return s;
  }

  Value select() const {
    if (out_type.structure == Structure::kDict) {
      auto attrs = store.attributes(pred());
      if (attrs.empty()) fail(Kind::kMissingGrounding, pred());
      return Value::dict(std::move(attrs));
    }
    auto members = store.members(pred());
    if (members.empty()) fail(Kind::kMissingGrounding, pred());
    if (out_type.structure == Structure::kScalar) {
      if (members.size() != 1) fail(Kind::kRuntimeTypeMismatch, "scalar select grounded " + std::to_string(members.size()) + " times");
      return members.front();
    }
    return Value::list(std::move(members));
  }

  Value filter() const {
    if (!store.has_predicate(pred())) fail(Kind::kMissingGrounding, pred());
    List out;
    for (const auto& x : list(0)) {
      if (store.has_membership(pred(), x)) out.push_back(x);
    }
    return Value::list(std::move(out));
  }

  Value project() const {
    const auto& in = value(0);
    auto attr = [&](const Value& x) {
      auto v = store.attribute(pred(), x);
      if (!v) fail(Kind::kMissingGrounding, pred() + " for " + to_string(x));
      return *v;
    };
    if (in.is_scalar()) return attr(in);
    Dict out;
    std::unordered_set<std::string> seen;
    for (const auto& x : list(0)) {
      if (seen.insert(scalar_key(x)).second) out.push_back({x, attr(x)});
    }
    return Value::dict(std::move(out));
  }

  Value boolean_grounding() const {
    if (ops.empty()) return Value::boolean(!store.members(pred()).empty());
    const auto& in = value(0);
    if (in.is_scalar()) return Value::boolean(store.has_membership(pred(), in));
    const auto& l = list(0);
    bool all = !l.empty() && std::all_of(l.begin(), l.end(), [&](const Value& x) {
      return store.has_membership(pred(), x);
    });
    return Value::boolean(all);
  }

  Value grouped_count() const {
    auto vals = values_for(list(0), dict(1));
    Dict out;
    std::unordered_map<std::string, std::size_t> pos;
    for (const auto* v : vals) {
      auto [it, inserted] = pos.emplace(scalar_key(*v), out.size());
      if (inserted) out.push_back({*v, Value::number(0)});
      auto& n = std::get<double>(out[it->second].value.data);
      n += 1;
    }
    return Value::dict(std::move(out));
  }

  std::vector<double> numbers(std::size_t i) const {
    std::vector<double> out;
    for (const auto& v : elements(i)) {
      if (!v.is_number()) fail(Kind::kRuntimeTypeMismatch, "expected numbers");
      out.push_back(v.as_number());
    }
    return out;
  }

  Value extreme(bool want_max) const {
    auto xs = elements(0);
    if (xs.empty()) fail(Kind::kEmptyAggregation);
    auto it = want_max ? std::max_element(xs.begin(), xs.end(), [&](const Value& a, const Value& b) { return cmp(a, b) < 0; })
                       : std::min_element(xs.begin(), xs.end(), [&](const Value& a, const Value& b) { return cmp(a, b) < 0; });
    return *it;
  }

  Value compared() const {
    const auto& thr = value(2);
    auto c = comparator(1);
    List out;
    for (const auto& e : dict(0)) {
      if (apply_comparator(c, cmp(e.value, thr))) out.push_back(e.key);
    }
    return Value::list(std::move(out));
  }

  // Distinct values of the keyed entries, ordered best-first.
  std::vector<const Value*> ranked_distinct(const std::vector<const Value*>& vals, bool highest) const {
    std::vector<const Value*> sorted = vals;
    std::sort(sorted.begin(), sorted.end(), [&](const Value* a, const Value* b) {
      auto o = cmp(*a, *b);
      return highest ? o > 0 : o < 0;
    });
    sorted.erase(std::unique(sorted.begin(), sorted.end(),
                             [&](const Value* a, const Value* b) { return cmp(*a, *b) == 0; }),
                 sorted.end());
    return sorted;
  }

  Value superlative(bool highest, std::size_t rank) const {
    const auto& keys = list(0);
    if (keys.empty()) fail(Kind::kEmptyAggregation);
    auto vals = values_for(keys, dict(1));
    auto distinct = ranked_distinct(vals, highest);
    if (rank < 1 || rank > distinct.size()) fail(Kind::kOutOfRange, "rank " + std::to_string(rank));
    const Value& target = *distinct[rank - 1];
    List out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (cmp(*vals[i], target) == 0) out.push_back(keys[i]);
    }
    return Value::list(std::move(out));
  }

  List sorted_keys(bool descending) const {
    const auto& keys = list(0);
    auto vals = values_for(keys, dict(1));
    std::vector<std::size_t> order(keys.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      auto o = cmp(*vals[a], *vals[b]);
      return descending ? o > 0 : o < 0;
    });
    List out;
    for (auto i : order) out.push_back(keys[i]);
    return out;
  }

  Value top_k(bool highest) const {
    std::size_t n = k(2);
    auto sorted = sorted_keys(highest);
    if (n > sorted.size()) fail(Kind::kOutOfRange, "k " + std::to_string(n));
    sorted.resize(n);
    return Value::list(std::move(sorted));
  }

  Value set_op(int mode) const {
    const auto& a = list(0);
    const auto& b = list(1);
    auto in_b = key_set(b);
    std::unordered_set<std::string> seen;
    List out;
    for (const auto& x : a) {
      auto key = scalar_key(x);
      bool keep = mode == 0 || (mode == 1 ? in_b.count(key) > 0 : in_b.count(key) == 0);
      if (keep && seen.insert(key).second) out.push_back(x);
    }
    if (mode == 0) {
      for (const auto& x : b) {
        if (seen.insert(scalar_key(x)).second) out.push_back(x);
      }
    }
    return Value::list(std::move(out));
  }

  Value sort_list(bool descending) const {
    List out = list(0);
    std::stable_sort(out.begin(), out.end(), [&](const Value& a, const Value& b) {
      auto o = cmp(a, b);
      return descending ? o > 0 : o < 0;
    });
    return Value::list(std::move(out));
  }

  static int month_or_mid(const Date& d) { return d.has_month_day() ? d.month : 7; }

  Value eval() const {
    using P = PrimitiveId;
    switch (call.primitive) {
      case P::kSelect: return select();
      case P::kProject: return project();
      case P::kFilter: return filter();
      case P::kBoolean: return boolean_grounding();
      case P::kCount: {
        const auto& v = value(0);
        if (v.is_scalar()) fail(Kind::kRuntimeTypeMismatch, "count of a scalar");
        return Value::number(static_cast<double>(cardinality(v)));
      }
      case P::kGroupedCount: return grouped_count();
      case P::kListSum: {
        auto xs = numbers(0);
        double s = 0;
        for (double x : xs) s += x;
        return Value::number(s);
      }
      case P::kListAverage: {
        auto xs = numbers(0);
        if (xs.empty()) fail(Kind::kEmptyAggregation);
        double s = 0;
        for (double x : xs) s += x;
        return Value::number(s / static_cast<double>(xs.size()));
      }
      case P::kListMedian: {
        auto xs = numbers(0);
        if (xs.empty()) fail(Kind::kEmptyAggregation);
        std::sort(xs.begin(), xs.end());
        std::size_t n = xs.size();
        return Value::number(n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0);
      }
      case P::kListMax: return extreme(true);
      case P::kListMin: return extreme(false);
      case P::kArithmeticSum: return Value::number(number(0) + number(1));
      case P::kArithmeticDifference: return Value::number(number(0) - number(1));
      case P::kArithmeticAbsoluteDifference: return Value::number(std::fabs(number(0) - number(1)));
      case P::kArithmeticMultiplication: return Value::number(number(0) * number(1));
      case P::kArithmeticDivision:
        if (number(1) == 0) fail(Kind::kDivisionByZero);
        return Value::number(number(0) / number(1));
      case P::kArithmeticPercentage:
        if (number(1) == 0) fail(Kind::kDivisionByZero);
        return Value::number(number(0) / number(1) * 100.0);
      case P::kFilterCompared: return compared();
      case P::kArgmax: return superlative(true, 1);
      case P::kArgmin: return superlative(false, 1);
      case P::kKthHighest: return superlative(true, k(2));
      case P::kKthLowest: return superlative(false, k(2));
      case P::kTopKHighest: return top_k(true);
      case P::kTopKLowest: return top_k(false);
      case P::kUnion: return set_op(0);
      case P::kIntersection: return set_op(1);
      case P::kDiscard: return set_op(2);
      case P::kSortAscending: return sort_list(false);
      case P::kSortDescending: return sort_list(true);
      case P::kSortKeysByValueAscending: return Value::list(sorted_keys(false));
      case P::kSortKeysByValueDescending: return Value::list(sorted_keys(true));
      case P::kDateDifferenceInYears:
        return Value::number(std::abs(date(0).year - date(1).year));
      case P::kDateDifferenceInMonths: {
        int a = date(0).year * 12 + month_or_mid(date(0));
        int b = date(1).year * 12 + month_or_mid(date(1));
        return Value::number(std::abs(a - b));
      }
      case P::kDateDifferenceInDays:
        return Value::number(static_cast<double>(std::llabs(to_days(date(0)) - to_days(date(1)))));
      case P::kExtractYear: return Value::number(date(0).year);
      case P::kLogicalAnd: return Value::boolean(boolean(0) && boolean(1));
      case P::kLogicalOr: return Value::boolean(boolean(0) || boolean(1));
      case P::kLogicalNot: return Value::boolean(!boolean(0));
      case P::kBooleanComparison: return Value::boolean(apply_comparator(comparator(1), cmp(value(0), value(2))));
      case P::kExists:
        if (value(0).is_scalar()) fail(Kind::kRuntimeTypeMismatch, "exists of a scalar");
        return Value::boolean(cardinality(value(0)) > 0);
      case P::kIsEmpty:
        if (value(0).is_scalar()) fail(Kind::kRuntimeTypeMismatch, "is_empty of a scalar");
        return Value::boolean(cardinality(value(0)) == 0);
      case P::kTakeKth: {
        const auto& l = list(0);
        std::size_t n = k(1);
        if (n < 1 || n > l.size()) fail(Kind::kOutOfRange, "k " + std::to_string(n));
        return l[n - 1];
      }
      case P::kSelectLarger: return cmp(value(0), value(1)) >= 0 ? value(0) : value(1);
      case P::kSelectSmaller: return cmp(value(0), value(1)) <= 0 ? value(0) : value(1);
      case P::kDictKeys: {
        List out;
        for (const auto& e : dict(0)) out.push_back(e.key);
        return Value::list(std::move(out));
      }
      case P::kDictValues: {
        List out;
        for (const auto& e : dict(0)) out.push_back(e.value);
        return Value::list(std::move(out));
      }
      case P::kCopy: return value(0);
    }
    fail(Kind::kRuntimeTypeMismatch, "unknown primitive");
  }
};

}  // namespace

Value eval_primitive(const PrimitiveCall& call, std::span<const Operand> operands, const FactStore& store,
                     const ValueType& out_type, int step) {
  return Evaluator{call, operands, store, out_type, step}.eval();
}

std::vector<Value> execute_steps(const TypedProgram& program, const FactStore& store) {
  std::vector<Value> steps;
  steps.reserve(program.size());
  for (std::size_t i = 0; i < program.size(); ++i) {
    int step = static_cast<int>(i) + 1;
    auto ops = resolve_operands(program.calls[i], steps);
    Value v = eval_primitive(program.calls[i], ops, store, program.types[i], step);
    if (!conforms(v, program.types[i])) {
      throw ExecError(ExecErrorKind::kRuntimeTypeMismatch, step,
                      "produced " + to_string(v) + ", expected " + to_string(program.types[i]));
    }
    steps.push_back(std::move(v));
  }
  return steps;
}

Value execute(const TypedProgram& program, const FactStore& store, ChainState& state, Chain chain) {
  auto steps = execute_steps(program, store);
  state.of(chain) = steps;
  return steps.back();
}

TypedProgram with_predicates(const TypedProgram& program, std::span<const std::optional<Predicate>> replacements) {
  TypedProgram out = program;
  for (std::size_t i = 0; i < out.calls.size() && i < replacements.size(); ++i) {
    if (replacements[i]) out.calls[i].predicate = replacements[i];
  }
  return out;
}

}  // namespace synthqa
