#include "synthqa/reference.hpp"

#include <cmath>
#include <cstdlib>

#include "synthqa/errors.hpp"

namespace synthqa::reference {
namespace {

using Kind = ExecErrorKind;

// Three-way comparison written directly over the payloads: -1, 0, 1.
int order(const Value& a, const Value& b, int step) {
  if (a.is_number() && b.is_number()) {
    return a.as_number() < b.as_number() ? -1 : (a.as_number() > b.as_number() ? 1 : 0);
  }
  if (a.is_date() && b.is_date()) {
    Date x = a.as_date(), y = b.as_date();
    if (x.has_month_day() != y.has_month_day()) {
      if (!x.has_month_day()) x = Date{x.year, 7, 1};
      if (!y.has_month_day()) y = Date{y.year, 7, 1};
    }
    long long kx = x.year * 10000LL + x.month * 100 + x.day;
    long long ky = y.year * 10000LL + y.month * 100 + y.day;
    return kx < ky ? -1 : (kx > ky ? 1 : 0);
  }
  if (a.is_entity() && b.is_entity()) {
    int c = a.as_entity().compare(b.as_entity());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  throw ExecError(Kind::kRuntimeTypeMismatch, step, "incomparable values");
}

bool holds(Comparator c, int o) {
  switch (c) {
    case Comparator::kGt: return o == 1;
    case Comparator::kLt: return o == -1;
    case Comparator::kGe: return o != -1;
    case Comparator::kLe: return o != 1;
    case Comparator::kEq: return o == 0;
  }
  return false;
}

bool contains(const List& xs, const Value& x) {
  for (const auto& y : xs) {
    if (y == x) return true;
  }
  return false;
}

// Days since 0000-03-01 in the proleptic Gregorian calendar, counted by hand.
long long day_number(Date d) {
  if (!d.has_month_day()) d = Date{d.year, 7, 1};
  static const int kCumulative[12] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};
  auto leap = [](int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; };
  long long y = d.year - 1;
  long long days = y * 365 + y / 4 - y / 100 + y / 400;
  days += kCumulative[d.month - 1] + d.day;
  if (d.month > 2 && leap(d.year)) days += 1;
  return days;
}

struct Naive {
  const PrimitiveCall& call;
  std::span<const Operand> ops;
  const FactStore& store;
  const ValueType& out_type;
  int step;

  [[noreturn]] void fail(Kind k) const { throw ExecError(k, step); }

  const Value& v(std::size_t i) const {
    if (i >= ops.size() || !std::holds_alternative<Value>(ops[i])) fail(Kind::kRuntimeTypeMismatch);
    return std::get<Value>(ops[i]);
  }
  Comparator comp(std::size_t i) const {
    if (i >= ops.size() || !std::holds_alternative<Comparator>(ops[i])) fail(Kind::kRuntimeTypeMismatch);
    return std::get<Comparator>(ops[i]);
  }
  const List& lst(std::size_t i) const {
    if (!v(i).is_list()) fail(Kind::kRuntimeTypeMismatch);
    return v(i).as_list();
  }
  const Dict& dct(std::size_t i) const {
    if (!v(i).is_dict()) fail(Kind::kRuntimeTypeMismatch);
    return v(i).as_dict();
  }
  double num(std::size_t i) const {
    if (!v(i).is_number()) fail(Kind::kRuntimeTypeMismatch);
    return v(i).as_number();
  }
  Date dt(std::size_t i) const {
    if (!v(i).is_date()) fail(Kind::kRuntimeTypeMismatch);
    return v(i).as_date();
  }
  bool bl(std::size_t i) const {
    if (!v(i).is_boolean()) fail(Kind::kRuntimeTypeMismatch);
    return v(i).as_boolean();
  }
  int ord(const Value& a, const Value& b) const { return order(a, b, step); }
  const std::string& pred() const { return call.predicate->text(); }

  List items(std::size_t i) const {
    if (v(i).is_list()) return v(i).as_list();
    if (!v(i).is_dict()) fail(Kind::kRuntimeTypeMismatch);
    List out;
    for (const auto& e : v(i).as_dict()) out.push_back(e.value);
    return out;
  }

  const Value& lookup(const Dict& d, const Value& key) const {
    for (const auto& e : d) {
      if (e.key == key) return e.value;
    }
    fail(Kind::kRuntimeTypeMismatch);
  }

  bool is_member(const Value& x) const {
    for (const auto& f : store.facts()) {
      if (!f.object && f.predicate.text() == pred() && f.subject == x) return true;
    }
    return false;
  }

  bool any_fact() const {
    for (const auto& f : store.facts()) {
      if (f.predicate.text() == pred()) return true;
    }
    return false;
  }

  double sum_of(const List& xs) const {
    double s = 0;
    for (const auto& x : xs) {
      if (!x.is_number()) fail(Kind::kRuntimeTypeMismatch);
      s += x.as_number();
    }
    return s;
  }

  // Keys ranked by value, best first, ties kept in key order (insertion sort).
  List rank_keys(bool highest) const {
    const List& keys = lst(0);
    const Dict& d = dct(1);
    List out;
    for (const auto& k : keys) {
      const Value& val = lookup(d, k);
      std::size_t pos = out.size();
      while (pos > 0) {
        int o = ord(lookup(d, out[pos - 1]), val);
        bool before = highest ? o < 0 : o > 0;
        if (!before) break;
        --pos;
      }
      out.insert(out.begin() + static_cast<long>(pos), k);
    }
    return out;
  }

  Value kth(bool highest, std::size_t rank) const {
    const List& keys = lst(0);
    const Dict& d = dct(1);
    if (keys.empty()) fail(Kind::kEmptyAggregation);
    List distinct;
    for (const auto& k : keys) {
      const Value& val = lookup(d, k);
      bool seen = false;
      for (const auto& x : distinct) seen = seen || ord(x, val) == 0;
      if (!seen) distinct.push_back(val);
    }
    if (rank < 1 || rank > distinct.size()) fail(Kind::kOutOfRange);
    // Pick the rank-th best by repeated selection.
    List remaining = distinct;
    Value target = remaining.front();
    for (std::size_t r = 0; r < rank; ++r) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < remaining.size(); ++i) {
        int o = ord(remaining[i], remaining[best]);
        if (highest ? o > 0 : o < 0) best = i;
      }
      target = remaining[best];
      remaining.erase(remaining.begin() + static_cast<long>(best));
    }
    List out;
    for (const auto& k : keys) {
      if (ord(lookup(d, k), target) == 0) out.push_back(k);
    }
    return Value::list(out);
  }

  Value run() const {
    using P = PrimitiveId;
    switch (call.primitive) {
      case P::kSelect: {
        if (out_type.structure == Structure::kDict) {
          Dict out;
          for (const auto& f : store.facts()) {
            if (f.object && f.predicate.text() == pred()) out.push_back({f.subject, *f.object});
          }
          if (out.empty()) fail(Kind::kMissingGrounding);
          return Value::dict(out);
        }
        List out;
        for (const auto& f : store.facts()) {
          if (!f.object && f.predicate.text() == pred()) out.push_back(f.subject);
        }
        if (out.empty()) fail(Kind::kMissingGrounding);
        if (out_type.structure == Structure::kScalar) {
          if (out.size() != 1) fail(Kind::kRuntimeTypeMismatch);
          return out[0];
        }
        return Value::list(out);
      }
      case P::kProject: {
        auto attr = [&](const Value& x) -> Value {
          for (const auto& f : store.facts()) {
            if (f.object && f.predicate.text() == pred() && f.subject == x) return *f.object;
          }
          fail(Kind::kMissingGrounding);
        };
        if (v(0).is_scalar()) return attr(v(0));
        Dict out;
        List keys;
        for (const auto& x : lst(0)) {
          if (contains(keys, x)) continue;
          keys.push_back(x);
          out.push_back({x, attr(x)});
        }
        return Value::dict(out);
      }
      case P::kFilter: {
        if (!any_fact()) fail(Kind::kMissingGrounding);
        List out;
        for (const auto& x : lst(0)) {
          if (is_member(x)) out.push_back(x);
        }
        return Value::list(out);
      }
      case P::kBoolean: {
        if (ops.empty()) {
          for (const auto& f : store.facts()) {
            if (!f.object && f.predicate.text() == pred()) return Value::boolean(true);
          }
          return Value::boolean(false);
        }
        if (v(0).is_scalar()) return Value::boolean(is_member(v(0)));
        const List& xs = lst(0);
        if (xs.empty()) return Value::boolean(false);
        for (const auto& x : xs) {
          if (!is_member(x)) return Value::boolean(false);
        }
        return Value::boolean(true);
      }
      case P::kCount: {
        if (v(0).is_list()) return Value::number(static_cast<double>(v(0).as_list().size()));
        if (v(0).is_dict()) return Value::number(static_cast<double>(v(0).as_dict().size()));
        fail(Kind::kRuntimeTypeMismatch);
      }
      case P::kGroupedCount: {
        const Dict& d = dct(1);
        List groups;
        for (const auto& k : lst(0)) {
          const Value& g = lookup(d, k);
          if (!contains(groups, g)) groups.push_back(g);
        }
        Dict out;
        for (const auto& g : groups) {
          double n = 0;
          for (const auto& k : lst(0)) n += lookup(d, k) == g ? 1 : 0;
          out.push_back({g, Value::number(n)});
        }
        return Value::dict(out);
      }
      case P::kListSum: return Value::number(sum_of(items(0)));
      case P::kListAverage: {
        List xs = items(0);
        if (xs.empty()) fail(Kind::kEmptyAggregation);
        return Value::number(sum_of(xs) / static_cast<double>(xs.size()));
      }
      case P::kListMedian: {
        List xs = items(0);
        if (xs.empty()) fail(Kind::kEmptyAggregation);
        sum_of(xs);  // type check
        // Count how many elements are below/equal to each candidate.
        std::size_t n = xs.size();
        auto kth_smallest = [&](std::size_t k) {
          for (const auto& c : xs) {
            std::size_t less = 0, equal = 0;
            for (const auto& y : xs) {
              if (y.as_number() < c.as_number()) ++less;
              if (y.as_number() == c.as_number()) ++equal;
            }
            if (less <= k && k < less + equal) return c.as_number();
          }
          return xs[0].as_number();
        };
        if (n % 2 == 1) return Value::number(kth_smallest(n / 2));
        return Value::number((kth_smallest(n / 2 - 1) + kth_smallest(n / 2)) / 2.0);
      }
      case P::kListMax:
      case P::kListMin: {
        List xs = items(0);
        if (xs.empty()) fail(Kind::kEmptyAggregation);
        bool want_max = call.primitive == P::kListMax;
        for (const auto& c : xs) {
          bool best = true;
          for (const auto& y : xs) {
            int o = ord(y, c);
            if (want_max ? o > 0 : o < 0) best = false;
          }
          if (best) return c;
        }
        fail(Kind::kEmptyAggregation);
      }
      case P::kArithmeticSum: return Value::number(num(0) + num(1));
      case P::kArithmeticDifference: return Value::number(num(0) - num(1));
      case P::kArithmeticAbsoluteDifference: {
        double d = num(0) - num(1);
        return Value::number(d < 0 ? -d : d);
      }
      case P::kArithmeticMultiplication: return Value::number(num(0) * num(1));
      case P::kArithmeticDivision:
        if (num(1) == 0) fail(Kind::kDivisionByZero);
        return Value::number(num(0) / num(1));
      case P::kArithmeticPercentage:
        if (num(1) == 0) fail(Kind::kDivisionByZero);
        return Value::number(num(0) / num(1) * 100.0);
      case P::kFilterCompared: {
        List out;
        for (const auto& e : dct(0)) {
          if (holds(comp(1), ord(e.value, v(2)))) out.push_back(e.key);
        }
        return Value::list(out);
      }
      case P::kArgmax: return kth(true, 1);
      case P::kArgmin: return kth(false, 1);
      case P::kKthHighest: return kth(true, static_cast<std::size_t>(num(2)));
      case P::kKthLowest: return kth(false, static_cast<std::size_t>(num(2)));
      case P::kTopKHighest:
      case P::kTopKLowest: {
        List ranked = rank_keys(call.primitive == P::kTopKHighest);
        std::size_t k = static_cast<std::size_t>(num(2));
        if (k > ranked.size()) fail(Kind::kOutOfRange);
        return Value::list(List(ranked.begin(), ranked.begin() + static_cast<long>(k)));
      }
      case P::kUnion: {
        List out;
        for (const auto& x : lst(0)) {
          if (!contains(out, x)) out.push_back(x);
        }
        for (const auto& x : lst(1)) {
          if (!contains(out, x)) out.push_back(x);
        }
        return Value::list(out);
      }
      case P::kIntersection:
      case P::kDiscard: {
        bool keep_shared = call.primitive == P::kIntersection;
        List out;
        for (const auto& x : lst(0)) {
          if (contains(lst(1), x) == keep_shared && !contains(out, x)) out.push_back(x);
        }
        return Value::list(out);
      }
      case P::kSortAscending:
      case P::kSortDescending: {
        bool desc = call.primitive == P::kSortDescending;
        List out;
        for (const auto& x : lst(0)) {
          std::size_t pos = out.size();
          while (pos > 0) {
            int o = ord(out[pos - 1], x);
            if (desc ? o >= 0 : o <= 0) break;
            --pos;
          }
          out.insert(out.begin() + static_cast<long>(pos), x);
        }
        return Value::list(out);
      }
      case P::kSortKeysByValueAscending: return Value::list(rank_keys(false));
      case P::kSortKeysByValueDescending: return Value::list(rank_keys(true));
      case P::kDateDifferenceInYears: {
        int d = dt(0).year - dt(1).year;
        return Value::number(d < 0 ? -d : d);
      }
      case P::kDateDifferenceInMonths: {
        auto months = [](const Date& d) { return d.year * 12 + (d.month == 0 ? 7 : d.month); };
        int d = months(dt(0)) - months(dt(1));
        return Value::number(d < 0 ? -d : d);
      }
      case P::kDateDifferenceInDays: {
        long long d = day_number(dt(0)) - day_number(dt(1));
        return Value::number(static_cast<double>(d < 0 ? -d : d));
      }
      case P::kExtractYear: return Value::number(dt(0).year);
      case P::kLogicalAnd: return Value::boolean(bl(0) ? bl(1) : false);
      case P::kLogicalOr: return Value::boolean(bl(0) ? true : bl(1));
      case P::kLogicalNot: return Value::boolean(bl(0) ? false : true);
      case P::kBooleanComparison: return Value::boolean(holds(comp(1), ord(v(0), v(2))));
      case P::kExists:
      case P::kIsEmpty: {
        std::size_t n;
        if (v(0).is_list()) n = v(0).as_list().size();
        else if (v(0).is_dict()) n = v(0).as_dict().size();
        else fail(Kind::kRuntimeTypeMismatch);
        return Value::boolean(call.primitive == P::kExists ? n != 0 : n == 0);
      }
      case P::kTakeKth: {
        std::size_t k = static_cast<std::size_t>(num(1));
        const List& xs = lst(0);
        if (k == 0 || k > xs.size()) fail(Kind::kOutOfRange);
        return xs[k - 1];
      }
      case P::kSelectLarger: return ord(v(0), v(1)) < 0 ? v(1) : v(0);
      case P::kSelectSmaller: return ord(v(0), v(1)) > 0 ? v(1) : v(0);
      case P::kDictKeys:
      case P::kDictValues: {
        List out;
        for (const auto& e : dct(0)) out.push_back(call.primitive == P::kDictKeys ? e.key : e.value);
        return Value::list(out);
      }
      case P::kCopy: return v(0);
    }
    fail(Kind::kRuntimeTypeMismatch);
  }
};

}  // namespace

Value eval_primitive(const PrimitiveCall& call, std::span<const Operand> operands, const FactStore& store,
                     const ValueType& out_type, int step) {
  return Naive{call, operands, store, out_type, step}.run();
}

std::vector<Value> execute_steps(const TypedProgram& program, const FactStore& store) {
  std::vector<Value> steps;
  for (std::size_t i = 0; i < program.calls.size(); ++i) {
    const auto& call = program.calls[i];
    std::vector<Operand> ops;
    for (const auto& a : call.args) {
      if (std::holds_alternative<StepRef>(a)) {
        ops.emplace_back(steps.at(static_cast<std::size_t>(std::get<StepRef>(a).step - 1)));
      } else if (std::holds_alternative<Comparator>(a)) {
        ops.emplace_back(std::get<Comparator>(a));
      } else {
        ops.emplace_back(std::get<Value>(a));
      }
    }
    steps.push_back(reference::eval_primitive(call, ops, store, program.types[i], static_cast<int>(i) + 1));
  }
  return steps;
}

}  // namespace synthqa::reference
