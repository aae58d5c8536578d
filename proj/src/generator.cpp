#include "synthqa/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>

#include "synthqa/checker.hpp"
#include "synthqa/errors.hpp"
#include "synthqa/type_inference.hpp"

namespace synthqa {

void GenerationConfig::validate() const {
  if (max_retries < 1) throw Error("max_retries must be at least 1");
  if (max_facts < 1) throw Error("max_facts must be at least 1");
  if (answer_cardinalities.empty()) throw Error("answer_cardinalities is empty");
  for (int n : answer_cardinalities) {
    if (n < 1) throw Error("answer cardinalities must be positive");
  }
  if (gold_pool_min < 2 || gold_pool_max < gold_pool_min) throw Error("bad gold pool range");
  if (distractor_pool_min < 1 || distractor_pool_max < distractor_pool_min) throw Error("bad distractor pool range");
  if (step_perturb_probability < 0 || step_perturb_probability > 1) throw Error("bad perturbation probability");
}

TypedProgram compile(const Decomposition& d) {
  return infer_types(normalize(parse_decomposition(d)), d.question_text);
}

namespace {

using P = PrimitiveId;

int ref_step(const PrimitiveCall& c, std::size_t slot) {
  if (slot >= c.args.size()) return -1;
  const auto* r = std::get_if<StepRef>(&c.args[slot]);
  return r ? r->step - 1 : -1;
}

std::optional<Value> literal(const PrimitiveCall& c, std::size_t slot) {
  if (slot >= c.args.size()) return std::nullopt;
  const auto* v = std::get_if<Value>(&c.args[slot]);
  return v ? std::optional<Value>(*v) : std::nullopt;
}

int literal_k(const PrimitiveCall& c, std::size_t slot) {
  auto v = literal(c, slot);
  return v && v->is_number() ? static_cast<int>(v->as_number()) : 1;
}

Comparator comparator_arg(const PrimitiveCall& c, std::size_t slot) {
  const auto* x = slot < c.args.size() ? std::get_if<Comparator>(&c.args[slot]) : nullptr;
  return x ? *x : Comparator::kEq;
}

Comparator flip(Comparator c) {
  switch (c) {
    case Comparator::kGt: return Comparator::kLt;
    case Comparator::kLt: return Comparator::kGt;
    case Comparator::kGe: return Comparator::kLe;
    case Comparator::kLe: return Comparator::kGe;
    case Comparator::kEq: return Comparator::kEq;
  }
  return c;
}

bool holds(Comparator c, const Value& x, const Value& thr) {
  if (x.scalar_base() != thr.scalar_base()) return false;
  return apply_comparator(c, compare_scalars(x, thr));
}

// Shape of the values a grounding step should produce for its consumer.
enum class Shape : std::uint8_t {
  kFree,
  kTiesMax,
  kTiesMin,
  kKthHigh,
  kKthLow,
  kThreshold,
  kDistinct,
  kGroups,
  kUnsortedAsc,
  kUnsortedDesc,
};

// self <cmp> other must come out as truth.
struct Relation {
  int other = -1;
  std::optional<Value> literal;
  Comparator cmp = Comparator::kGt;
  std::optional<bool> truth;  // unset: random for gold, flipped for the distractor
  int consumer = -1;
};

struct Overlap {
  int other = -1;
  int include = 0;
  int fresh = 0;
};

struct StepPlan {
  int want = 0;
  Shape shape = Shape::kFree;
  int count = 0;
  int rank = 1;
  int consumer = -1;
  int scope = -1;  // keys step the shape is computed over
  std::optional<Overlap> overlap;
  std::optional<Relation> relation;
  int split_dict = -1;
  int split_count = 0;
  Comparator split_cmp = Comparator::kGt;
  std::vector<int> differ_from;
  bool nonzero = false;
  bool may_empty = false;
  int bool_differs_from = -1;
};

std::vector<StepPlan> plan_steps(const TypedProgram& tp, int N, Rng& rng) {
  const int n = static_cast<int>(tp.size());
  std::vector<StepPlan> plan(tp.size());
  auto set_want = [&](int s, int v) {
    if (s >= 0 && v > 0 && plan[s].want == 0) plan[s].want = v;
  };
  auto set_shape = [&](int s, Shape sh, int count, int consumer, int scope) {
    if (s < 0 || plan[s].shape != Shape::kFree) return;
    plan[s].shape = sh;
    plan[s].count = count;
    plan[s].consumer = consumer;
    plan[s].scope = scope;
  };
  if (tp.answer_type().structure != Structure::kScalar) plan[n - 1].want = N;

  for (int c = n - 1; c >= 0; --c) {
    const auto& call = tp.calls[c];
    const int w = plan[c].want;
    const int a = ref_step(call, 0), b = ref_step(call, 1);
    switch (call.primitive) {
      case P::kFilter:
        if (w > 0) set_want(a, w + rng.uniform_int(1, 2));
        break;
      case P::kProject:
        if (a >= 0 && tp.types[a].structure == Structure::kList) set_want(a, w);
        break;
      case P::kDictKeys:
      case P::kDictValues:
        set_want(a, w);
        break;
      case P::kGroupedCount: {
        int g = w > 0 ? w : rng.uniform_int(1, 3);
        int size = g + rng.uniform_int(1, 2);
        set_shape(b, Shape::kGroups, g, c, a);
        set_want(a, size);
        set_want(b, size);
        break;
      }
      case P::kListSum:
      case P::kListAverage:
      case P::kListMedian:
      case P::kListMax:
      case P::kListMin:
        set_want(a, rng.uniform_int(2, 4));
        break;
      case P::kTakeKth:
        set_want(a, std::max(literal_k(call, 1), 2) + rng.uniform_int(0, 1));
        break;
      case P::kArgmax:
      case P::kArgmin: {
        int t = w > 0 ? w : 1;
        int size = t + rng.uniform_int(1, 2);
        set_shape(b, call.primitive == P::kArgmax ? Shape::kTiesMax : Shape::kTiesMin, t, c, a);
        set_want(a, size);
        set_want(b, size);
        break;
      }
      case P::kKthHighest:
      case P::kKthLowest: {
        int k = literal_k(call, 2), t = w > 0 ? w : 1;
        int size = t + k - 1 + rng.uniform_int(1, 2);
        set_shape(b, call.primitive == P::kKthHighest ? Shape::kKthHigh : Shape::kKthLow, t, c, a);
        if (b >= 0) plan[b].rank = k;
        set_want(a, size);
        set_want(b, size);
        break;
      }
      case P::kTopKHighest:
      case P::kTopKLowest: {
        int size = literal_k(call, 2) + rng.uniform_int(1, 2);
        set_shape(b, Shape::kDistinct, 0, c, a);
        set_want(a, size);
        set_want(b, size);
        break;
      }
      case P::kFilterCompared: {
        int t = w > 0 ? w : rng.uniform_int(1, 2);
        set_shape(a, Shape::kThreshold, t, c, -1);
        set_want(a, t + rng.uniform_int(1, 2));
        int thr = ref_step(call, 2);
        if (thr > a && a >= 0 && plan[thr].split_dict < 0) {
          plan[thr].split_dict = a;
          plan[thr].split_count = t;
          plan[thr].split_cmp = comparator_arg(call, 1);
        }
        break;
      }
      case P::kSortAscending:
      case P::kSortDescending:
        set_shape(a, call.primitive == P::kSortAscending ? Shape::kUnsortedAsc : Shape::kUnsortedDesc, 0, c, -1);
        set_want(a, w > 0 ? w : rng.uniform_int(2, 4));
        break;
      case P::kSortKeysByValueAscending:
      case P::kSortKeysByValueDescending: {
        int size = w > 0 ? w : rng.uniform_int(2, 4);
        set_shape(b, call.primitive == P::kSortKeysByValueAscending ? Shape::kUnsortedAsc : Shape::kUnsortedDesc, 0,
                  c, a);
        set_want(a, size);
        set_want(b, size);
        break;
      }
      case P::kUnion:
      case P::kIntersection:
      case P::kDiscard: {
        if (a < 0 || b < 0 || a == b) break;
        int early = std::min(a, b), late = std::max(a, b);
        int size_early = 0;
        Overlap ov{early, 0, 0};
        if (call.primitive == P::kUnion) {
          // a select operand needs two members of its own
          int lo = tp.calls[early].primitive == P::kSelect ? 2 : 1;
          int t = std::max(w > 0 ? w : rng.uniform_int(lo + 1, 4), 2);
          size_early = std::max(1, std::min(t - 1, rng.uniform_int(lo, std::max(lo, t - 1))));
          ov.include = rng.uniform_int(0, size_early - 1);
          ov.fresh = t - size_early;
          if (tp.calls[late].primitive == P::kSelect && ov.include + ov.fresh < 2) {
            ov.include = std::min(size_early - 1, 2 - ov.fresh);
          }
        } else if (call.primitive == P::kIntersection) {
          int t = w > 0 ? w : rng.uniform_int(1, 2);
          size_early = t + rng.uniform_int(1, 2);
          ov.include = t;
          ov.fresh = rng.uniform_int(1, 2);
        } else {
          int t = w > 0 ? w : rng.uniform_int(1, 2);
          if (a == early) {
            size_early = t + rng.uniform_int(1, 2);
            ov.include = size_early - t;
            ov.fresh = rng.uniform_int(0, 1);
          } else {
            size_early = rng.uniform_int(1, 3);
            ov.include = rng.uniform_int(1, size_early);
            ov.fresh = t;
          }
        }
        set_want(early, size_early);
        if (!plan[late].overlap) {
          plan[late].overlap = ov;
          set_want(late, ov.include + ov.fresh);
        }
        break;
      }
      case P::kSelectLarger:
      case P::kSelectSmaller:
      case P::kDateDifferenceInYears:
      case P::kDateDifferenceInMonths:
      case P::kDateDifferenceInDays:
      case P::kArithmeticSum:
      case P::kArithmeticMultiplication:
      case P::kArithmeticAbsoluteDifference:
      case P::kArithmeticDivision:
      case P::kArithmeticPercentage:
        if (a >= 0 && b >= 0 && a != b) plan[std::max(a, b)].differ_from.push_back(std::min(a, b));
        if (call.primitive == P::kArithmeticDivision || call.primitive == P::kArithmeticPercentage ||
            call.primitive == P::kArithmeticSum || call.primitive == P::kArithmeticMultiplication) {
          if (b >= 0) plan[b].nonzero = true;
          if (a >= 0) plan[a].nonzero = true;
        }
        break;
      case P::kArithmeticDifference:
        if (a >= 0 && b >= 0 && a != b) {
          int late = std::max(a, b), early = std::min(a, b);
          if (!plan[late].relation) {
            plan[late].relation = Relation{early, std::nullopt, late == a ? Comparator::kGt : Comparator::kLt, true, c};
          }
        }
        break;
      case P::kLogicalAnd:
      case P::kLogicalOr:
        if (a >= 0 && b >= 0 && a != b) plan[std::max(a, b)].bool_differs_from = std::min(a, b);
        break;
      case P::kBooleanComparison: {
        Comparator cmp = comparator_arg(call, 1);
        int thr = ref_step(call, 2);
        if (a < 0) break;
        if (thr < 0) {
          if (!plan[a].relation) plan[a].relation = Relation{-1, literal(call, 2), cmp, std::nullopt, c};
        } else if (a > thr) {
          if (!plan[a].relation) plan[a].relation = Relation{thr, std::nullopt, cmp, std::nullopt, c};
        } else if (thr > a) {
          if (!plan[thr].relation) plan[thr].relation = Relation{a, std::nullopt, flip(cmp), std::nullopt, c};
        }
        break;
      }
      case P::kExists:
      case P::kIsEmpty:
        if (a >= 0) plan[a].may_empty = true;
        break;
      default:
        break;
    }
  }
  return plan;
}

struct AttemptSettings {
  int pool_min = 3;
  int pool_max = 6;
  int extra_min = 1;
  int extra_max = 2;
  int dis_min = 2;
  int dis_max = 4;
  bool full_dates = false;
  std::vector<int> num_class;
};

constexpr std::string_view kVerbLike[] = {
    "threw", "caught", "won",   "lost",  "scored", "kicked", "made",  "ran",     "had",   "has",
    "have",  "did",    "does",  "got",   "gave",   "took",   "led",   "held",    "beat",  "came",
    "went",  "saw",    "wrote", "sang",  "built",  "bought", "sold",  "plays",   "owns",  "contains",
    "includes", "wins", "scores", "belongs", "lives", "works", "can", "could", "will", "would"};

constexpr std::string_view kWhWords[] = {"what", "when", "where", "who", "which", "how", "whose", "why"};

std::string first_word(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == ' ') {
      if (!out.empty()) break;
      continue;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool in_list(std::string_view w, std::span<const std::string_view> list) {
  return std::find(list.begin(), list.end(), w) != list.end();
}

std::string family_for(const PrimitiveCall& call, const ValueType& type) {
  const auto& text = call.predicate->text();
  auto w = first_word(text);
  switch (call.primitive) {
    case P::kSelect:
      if (type.structure == Structure::kScalar) return "select_single";
      if (type.structure == Structure::kDict) return "select_attr";
      return "select";
    case P::kProject:
      return in_list(w, kWhWords) ? "project_question" : "project";
    case P::kBoolean:
      if (call.args.empty()) return "boolean_open";
      [[fallthrough]];
    default: {
      bool verb = (w.size() > 3 && w.ends_with("ed")) || in_list(w, kVerbLike);
      return verb ? "filter_verb" : "filter";
    }
  }
}

List distinct_elements(const Value& v) {
  List out;
  std::set<std::string> seen;
  auto push = [&](const Value& x) {
    if (seen.insert(scalar_key(x)).second) out.push_back(x);
  };
  if (v.is_list()) {
    for (const auto& x : v.as_list()) push(x);
  } else if (v.is_dict()) {
    for (const auto& e : v.as_dict()) push(e.key);
  } else {
    push(v);
  }
  return out;
}

std::set<std::string> key_set(const List& l) {
  std::set<std::string> s;
  for (const auto& x : l) s.insert(scalar_key(x));
  return s;
}

bool sorted_in(const std::vector<Value>& vals, bool descending) {
  for (std::size_t i = 1; i < vals.size(); ++i) {
    auto o = compare_scalars(vals[i - 1], vals[i]);
    if (descending ? o < 0 : o > 0) return false;
  }
  return true;
}

// Grounds one chain step by step into a shared store.
class Builder {
 public:
  Builder(const TypedProgram& tp, const std::vector<StepPlan>& plan, const AttemptSettings& s, FactStore& store,
          Rng& rng, std::set<std::string>& names)
      : tp_(tp), plan_(plan), s_(s), store_(store), rng_(rng), names_(names) {}

  // Gold chain when gold == nullptr; otherwise the distractor chain, where
  // `perturbed` marks steps whose predicate differs from the gold one.
  bool step(std::size_t i, const PrimitiveCall& call, std::vector<Value>& vals, const std::vector<Value>* gold,
            bool perturbed, std::string& reason) {
    call_ = &call;
    i_ = i;
    vals_ = &vals;
    gold_ = gold;
    perturbed_ = perturbed;
    bool ok = true;
    switch (call.primitive) {
      case P::kSelect: ok = select(reason); break;
      case P::kProject: ok = project(reason); break;
      case P::kFilter: ok = filter(reason); break;
      case P::kBoolean: ok = boolean(reason); break;
      default: break;
    }
    if (!ok) return false;
    try {
      auto ops = resolve_operands(call, vals);
      vals[i] = eval_primitive(call, ops, store_, tp_.types[i], static_cast<int>(i) + 1);
    } catch (const ExecError& e) {
      reason = std::string(gold ? "distractor_" : "") + to_string(e.kind());
      return false;
    }
    return true;
  }

 private:
  const TypedProgram& tp_;
  const std::vector<StepPlan>& plan_;
  const AttemptSettings& s_;
  FactStore& store_;
  Rng& rng_;
  std::set<std::string>& names_;

  const PrimitiveCall* call_ = nullptr;
  std::size_t i_ = 0;
  std::vector<Value>* vals_ = nullptr;
  const std::vector<Value>* gold_ = nullptr;
  bool perturbed_ = false;

  bool is_gold() const { return gold_ == nullptr; }
  const StepPlan& plan() const { return plan_[i_]; }
  const ValueType& type() const { return tp_.types[i_]; }
  const std::string& pred() const { return call_->predicate->text(); }
  Chain chain() const { return is_gold() ? Chain::kGold : Chain::kDistractor; }

  void add(const Value& subject, std::optional<Value> object = std::nullopt) {
    store_.add(Fact{*call_->predicate, family_for(*call_, type()), subject, std::move(object), chain()});
  }

  Value fresh_entity() {
    for (;;) {
      std::string s(3, 'A');
      for (char& c : s) c = static_cast<char>('A' + rng_.below(26));
      if (names_.insert(s).second) return Value::entity(s);
    }
  }

  Value random_number() {
    switch (s_.num_class[i_]) {
      case 0: return make_number(rng_.uniform_int(1, 99));
      case 1: return make_number(rng_.uniform_int(100, 9999));
      case 2: return make_number(rng_.uniform_int(10000, 999999));
      default: return make_number(rng_.uniform_int(1, 99999) / 100.0);
    }
  }

  Value random_date() {
    Date d{rng_.uniform_int(1850, 2020), 0, 0};
    if (s_.full_dates) {
      d.month = rng_.uniform_int(1, 12);
      d.day = rng_.uniform_int(1, 28);
    }
    return make_date(d);
  }

  Value random_scalar(Base b) {
    switch (b) {
      case Base::kNumber: return random_number();
      case Base::kDate: return random_date();
      case Base::kBoolean: return Value::boolean(rng_.chance(0.5));
      case Base::kEntity: break;
    }
    return fresh_entity();
  }

  std::vector<Value> distinct_values(Base b, std::size_t n, std::set<std::string> avoid = {}) {
    std::vector<Value> out;
    for (int tries = 0; out.size() < n && tries < 400; ++tries) {
      Value v = random_scalar(b);
      if (avoid.insert(scalar_key(v)).second) out.push_back(v);
    }
    return out;
  }

  std::vector<Value> sorted_distinct(Base b, std::size_t n, bool descending) {
    auto v = distinct_values(b, n);
    std::sort(v.begin(), v.end(), [&](const Value& x, const Value& y) {
      auto o = compare_scalars(x, y);
      return descending ? o > 0 : o < 0;
    });
    return v;
  }

  // A value near o in direction dir (+1 above, -1 below).
  std::optional<Value> shift(const Value& o, int dir) {
    if (o.is_number()) {
      double x = o.as_number();
      bool integral = std::floor(x) == x;
      double y;
      if (integral) {
        long long span = std::max<long long>(1, static_cast<long long>(x * 0.3));
        y = x + dir * static_cast<double>(rng_.uniform_int(1, static_cast<int>(std::min<long long>(span, 100000))));
      } else {
        int span = std::max(1, static_cast<int>(x * 30));
        y = std::round((x + dir * rng_.uniform_int(1, std::min(span, 10000000)) / 100.0) * 100.0) / 100.0;
      }
      if (y < kMinNumber || y > kMaxNumber) y = x + dir;
      if (y < kMinNumber || y > kMaxNumber) return std::nullopt;
      return make_number(y);
    }
    if (o.is_date()) {
      Date d = o.as_date();
      int y = d.year + dir * rng_.uniform_int(1, 10);
      if (y < kMinYear || y > kMaxYear) y = d.year + dir;
      if (y < kMinYear || y > kMaxYear) return std::nullopt;
      Date out{y, d.month, d.day};
      if (out.month == 2 && out.day == 29) out.day = 28;
      return make_date(out);
    }
    return std::nullopt;
  }

  // A value v with (v cmp o) == truth.
  std::optional<Value> related(const Value& o, Comparator cmp, bool truth) {
    std::vector<Value> cands;
    for (int dir : {1, -1}) {
      if (auto v = shift(o, dir)) cands.push_back(*v);
    }
    cands.push_back(o);
    std::vector<Value> ok;
    for (const auto& v : cands) {
      if (holds(cmp, v, o) == truth) ok.push_back(v);
    }
    if (ok.empty()) return std::nullopt;
    return rng_.pick(ok);
  }

  bool value_is(std::size_t step, Base b) const {
    const auto& v = (*vals_)[step];
    return v.is_scalar() && v.scalar_base() == b;
  }

  Value scalar_value(Base b) {
    const auto& p = plan();
    const auto& vals = *vals_;
    if (p.relation && (b == Base::kNumber || b == Base::kDate)) {
      const auto& r = *p.relation;
      std::optional<Value> other = r.literal;
      if (r.other >= 0) other = vals[r.other];
      if (other && other->is_scalar() && other->scalar_base() == b) {
        bool truth;
        if (r.truth) {
          truth = *r.truth;
        } else if (!is_gold() && (*gold_)[r.consumer].is_boolean()) {
          // flip the gold outcome of the comparison
          truth = !(*gold_)[r.consumer].as_boolean();
        } else {
          truth = rng_.chance(0.5);
        }
        if (auto v = related(*other, r.cmp, truth)) return *v;
      }
    }
    if (p.split_dict >= 0 && vals[p.split_dict].is_dict() && !vals[p.split_dict].as_dict().empty()) {
      const auto& d = vals[p.split_dict].as_dict();
      std::vector<Value> cands;
      for (const auto& e : d) {
        if (e.value.scalar_base() != b) continue;
        cands.push_back(e.value);
        for (int dir : {1, -1}) {
          if (auto v = shift(e.value, dir)) cands.push_back(*v);
        }
      }
      std::vector<Value> ok;
      for (const auto& t : cands) {
        int pass = 0;
        for (const auto& e : d) pass += holds(p.split_cmp, e.value, t);
        bool good = is_gold() ? pass == p.split_count : pass != p.split_count;
        if (good) ok.push_back(t);
      }
      if (!ok.empty()) return rng_.pick(ok);
    }
    Value x = random_scalar(b);
    for (int tries = 0; tries < 32; ++tries) {
      bool bad = p.nonzero && x.is_number() && x.as_number() == 0;
      for (int d : p.differ_from) bad = bad || vals[d] == x;
      if (!bad) break;
      x = random_scalar(b);
    }
    return x;
  }

  // Values for `keys` shaped for the consumer. Keys outside the consumer's
  // scope get free values.
  std::optional<std::vector<Value>> dict_values(const List& keys, Base b) {
    const auto& p = plan();
    const auto& vals = *vals_;
    std::size_t n = keys.size();
    std::vector<Value> out(n);
    std::vector<std::size_t> in_scope, free_pos;
    if (p.scope >= 0 && p.scope < static_cast<int>(i_) && vals[p.scope].is_list()) {
      auto sk = key_set(vals[p.scope].as_list());
      // scope order follows the keys list so sort hints apply to it
      std::vector<std::size_t> pos_by_key;
      for (const auto& k : vals[p.scope].as_list()) {
        for (std::size_t j = 0; j < n; ++j) {
          if (keys[j] == k && std::find(pos_by_key.begin(), pos_by_key.end(), j) == pos_by_key.end()) {
            pos_by_key.push_back(j);
          }
        }
      }
      in_scope = pos_by_key;
      for (std::size_t j = 0; j < n; ++j) {
        if (!sk.count(scalar_key(keys[j]))) free_pos.push_back(j);
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) in_scope.push_back(j);
    }
    for (auto j : free_pos) out[j] = random_scalar(b);
    std::size_t m = in_scope.size();
    bool ordered = b == Base::kNumber || b == Base::kDate;
    Shape shape = p.shape;
    if (!ordered && shape != Shape::kGroups) shape = Shape::kFree;
    if (!is_gold() && shape != Shape::kThreshold) shape = Shape::kFree;

    auto shuffled_scope = [&] {
      auto s = in_scope;
      rng_.shuffle(s);
      return s;
    };
    switch (shape) {
      case Shape::kTiesMax:
      case Shape::kTiesMin: {
        std::size_t t = static_cast<std::size_t>(p.count);
        if (t == 0 || t >= m) return std::nullopt;
        auto levels = sorted_distinct(b, m - t + 1, shape == Shape::kTiesMax);
        if (levels.size() != m - t + 1) return std::nullopt;
        auto pos = shuffled_scope();
        for (std::size_t j = 0; j < m; ++j) out[pos[j]] = j < t ? levels[0] : levels[j - t + 1];
        return out;
      }
      case Shape::kKthHigh:
      case Shape::kKthLow: {
        std::size_t t = static_cast<std::size_t>(p.count), k = static_cast<std::size_t>(std::max(p.rank, 1));
        if (t == 0 || t + k - 1 >= m) return std::nullopt;
        std::size_t below = m - t - (k - 1);
        auto levels = sorted_distinct(b, (k - 1) + 1 + below, shape == Shape::kKthHigh);
        if (levels.size() != (k - 1) + 1 + below) return std::nullopt;
        auto pos = shuffled_scope();
        std::size_t j = 0;
        for (std::size_t l = 0; l + 1 < k; ++l) out[pos[j++]] = levels[l];
        for (std::size_t l = 0; l < t; ++l) out[pos[j++]] = levels[k - 1];
        for (std::size_t l = 0; l < below; ++l) out[pos[j++]] = levels[k + l];
        return out;
      }
      case Shape::kThreshold: {
        const auto& cc = tp_.calls[p.consumer];
        Comparator cmp = comparator_arg(cc, 1);
        std::optional<Value> thr = literal(cc, 2);
        int ts = ref_step(cc, 2);
        if (ts >= 0 && ts < static_cast<int>(i_)) thr = vals[ts];
        if (!thr || !thr->is_scalar() || thr->scalar_base() != b) break;
        std::size_t t = static_cast<std::size_t>(p.count);
        if (!is_gold()) t = rng_.below(m + 1);
        if (is_gold() && t >= m) return std::nullopt;
        auto pos = shuffled_scope();
        for (std::size_t j = 0; j < m; ++j) {
          auto v = related(*thr, cmp, j < t);
          if (!v) return std::nullopt;
          out[pos[j]] = *v;
        }
        return out;
      }
      case Shape::kGroups: {
        std::size_t g = static_cast<std::size_t>(p.count);
        if (g == 0 || g > m) return std::nullopt;
        auto pool = distinct_values(b, g);
        if (pool.size() != g) return std::nullopt;
        auto pos = shuffled_scope();
        for (std::size_t j = 0; j < m; ++j) out[pos[j]] = j < g ? pool[j] : pool[rng_.below(g)];
        return out;
      }
      default:
        break;
    }
    auto vs = distinct_values(b, m);
    if (vs.size() != m) {
      for (std::size_t j = 0; j < m; ++j) out[in_scope[j]] = random_scalar(b);
      return out;
    }
    if ((shape == Shape::kUnsortedAsc || shape == Shape::kUnsortedDesc) && m >= 2 &&
        sorted_in(vs, shape == Shape::kUnsortedDesc)) {
      std::swap(vs[0], vs[1]);
    }
    for (std::size_t j = 0; j < m; ++j) out[in_scope[j]] = vs[j];
    return out;
  }

  int free_size() { return rng_.uniform_int(s_.pool_min, s_.pool_max); }

  // Fresh scalars of base b not among `avoid`.
  List fresh_scalars(Base b, std::size_t n, const List& avoid = {}) {
    if (b == Base::kEntity) {
      List out;
      for (std::size_t j = 0; j < n; ++j) out.push_back(fresh_entity());
      return out;
    }
    return distinct_values(b, n, key_set(avoid));
  }

  bool select(std::string& reason) {
    if (store_.has_predicate(pred())) return true;
    const auto& t = type();
    const auto& p = plan();
    if (t.structure == Structure::kScalar) {
      add(t.base == Base::kEntity ? fresh_entity() : scalar_value(t.base));
      return true;
    }
    int n;
    if (is_gold()) {
      n = p.want > 0 ? p.want : free_size();
      if (n < 2) {
        reason = "select_singleton";
        return false;
      }
    } else {
      n = rng_.uniform_int(s_.dis_min, s_.dis_max);
      std::size_t gold_n = cardinality((*gold_)[i_]);
      if (static_cast<std::size_t>(n) == gold_n) n += rng_.chance(0.5) || n <= 1 ? 1 : -1;
    }
    if (t.structure == Structure::kDict) {
      List keys = fresh_scalars(t.key, static_cast<std::size_t>(n));
      auto values = dict_values(keys, t.base);
      if (!values) {
        reason = "value_shape";
        return false;
      }
      for (std::size_t j = 0; j < keys.size(); ++j) add(keys[j], (*values)[j]);
      return true;
    }
    List members;
    if (is_gold() && p.overlap && (*vals_)[p.overlap->other].is_list()) {
      auto other = distinct_elements((*vals_)[p.overlap->other]);
      rng_.shuffle(other);
      std::size_t inc = std::min<std::size_t>(static_cast<std::size_t>(p.overlap->include), other.size());
      members.assign(other.begin(), other.begin() + static_cast<long>(inc));
      auto fresh = fresh_scalars(t.base, static_cast<std::size_t>(p.overlap->fresh), other);
      members.insert(members.end(), fresh.begin(), fresh.end());
      rng_.shuffle(members);
    } else if (t.base == Base::kEntity) {
      if (!is_gold() && (*gold_)[i_].is_list() && !(*gold_)[i_].as_list().empty() && rng_.chance(0.5)) {
        members.push_back(rng_.pick((*gold_)[i_].as_list()));
      }
      while (members.size() < static_cast<std::size_t>(n)) members.push_back(fresh_entity());
    } else {
      std::vector<Value> vs = distinct_values(t.base, static_cast<std::size_t>(n));
      bool desc = p.shape == Shape::kUnsortedDesc;
      if ((p.shape == Shape::kUnsortedAsc || desc) && vs.size() >= 2 && sorted_in(vs, desc)) std::swap(vs[0], vs[1]);
      for (const auto& v : vs) {
        bool bad = p.nonzero && v.is_number() && v.as_number() == 0;
        if (!bad) members.push_back(v);
      }
    }
    for (const auto& m : members) add(m);
    return true;
  }

  bool project(std::string& reason) {
    const auto& t = type();
    const Value& in = (*vals_)[static_cast<std::size_t>(ref_step(*call_, 0))];
    List keys = distinct_elements(in);
    List todo;
    for (const auto& k : keys) {
      if (!store_.attribute(pred(), k)) todo.push_back(k);
    }
    if (!todo.empty()) {
      if (in.is_scalar()) {
        add(todo[0], scalar_value(t.base));
      } else if (is_gold() || perturbed_) {
        auto values = dict_values(todo, t.base);
        if (!values) {
          reason = "value_shape";
          return false;
        }
        for (std::size_t j = 0; j < todo.size(); ++j) add(todo[j], (*values)[j]);
      } else {
        for (const auto& k : todo) add(k, random_scalar(t.base));
      }
    }
    if (is_gold()) {
      Base key_base = in.is_scalar() ? *in.scalar_base() : tp_.types[ref_step(*call_, 0)].base;
      auto extras = fresh_scalars(key_base, static_cast<std::size_t>(rng_.uniform_int(s_.extra_min, s_.extra_max)), keys);
      for (const auto& x : extras) add(x, random_scalar(t.base));
    }
    return true;
  }

  bool filter(std::string& reason) {
    const auto& p = plan();
    const Value& in = (*vals_)[static_cast<std::size_t>(ref_step(*call_, 0))];
    List elems = distinct_elements(in);
    std::size_t n = elems.size();
    Base eb = elems.empty() ? tp_.types[ref_step(*call_, 0)].base : *elems[0].scalar_base();
    if (!is_gold() && !perturbed_) {
      auto gold_in = key_set(distinct_elements((*gold_)[static_cast<std::size_t>(ref_step(*call_, 0))]));
      for (const auto& x : elems) {
        if (!gold_in.count(scalar_key(x)) && !store_.has_membership(pred(), x) && rng_.chance(0.5)) add(x);
      }
      return true;
    }
    std::size_t k;
    if (!is_gold()) {
      std::size_t gold_k = cardinality((*gold_)[i_]);
      k = rng_.below(n + 1);
      if (k == gold_k && n > 0) k = rng_.below(n + 1);
    } else if (p.want > 0) {
      k = static_cast<std::size_t>(p.want);
    } else if (p.may_empty && rng_.chance(0.5)) {
      k = 0;
    } else if (n >= 2) {
      k = static_cast<std::size_t>(rng_.uniform_int(1, static_cast<int>(n) - 1));
    } else {
      k = 0;
      if (!p.may_empty) {
        reason = "filter_input_too_small";
        return false;
      }
    }
    if (is_gold() && (k >= n || n == 0)) {
      reason = "filter_input_too_small";
      return false;
    }
    List keep;
    if (is_gold() && p.overlap && (*vals_)[p.overlap->other].is_list()) {
      auto other = key_set(distinct_elements((*vals_)[p.overlap->other]));
      List inside, outside;
      for (const auto& x : elems) (other.count(scalar_key(x)) ? inside : outside).push_back(x);
      rng_.shuffle(inside);
      rng_.shuffle(outside);
      std::size_t inc = std::min<std::size_t>(static_cast<std::size_t>(p.overlap->include), inside.size());
      keep.assign(inside.begin(), inside.begin() + static_cast<long>(inc));
      for (std::size_t j = 0; j < outside.size() && keep.size() < k; ++j) keep.push_back(outside[j]);
      for (std::size_t j = inc; j < inside.size() && keep.size() < k; ++j) keep.push_back(inside[j]);
    } else {
      keep = elems;
      rng_.shuffle(keep);
      keep.resize(k);
    }
    auto keep_keys = key_set(keep);
    for (const auto& x : elems) {
      if (store_.has_membership(pred(), x) && !keep_keys.count(scalar_key(x))) {
        reason = "filter_conflict";
        return false;
      }
    }
    // Insertion order follows the input so facts do not reveal the kept subset.
    for (const auto& x : elems) {
      if (keep_keys.count(scalar_key(x)) && !store_.has_membership(pred(), x)) add(x);
    }
    if (is_gold()) {
      auto extras = fresh_scalars(eb, static_cast<std::size_t>(rng_.uniform_int(s_.extra_min, s_.extra_max)), elems);
      for (const auto& x : extras) add(x);
    } else if (!store_.has_predicate(pred())) {
      for (const auto& x : fresh_scalars(eb, 1, elems)) add(x);
    }
    return true;
  }

  bool boolean(std::string&) {
    const auto& p = plan();
    if (call_->args.empty()) {
      if (!is_gold() && !perturbed_) return true;
      bool truth = is_gold() ? rng_.chance(0.5) : !(*gold_)[i_].as_boolean();
      if (is_gold() && p.bool_differs_from >= 0 && value_is(p.bool_differs_from, Base::kBoolean)) {
        truth = !(*vals_)[p.bool_differs_from].as_boolean();
      }
      if (truth) add(fresh_entity());
      return true;
    }
    const Value& in = (*vals_)[static_cast<std::size_t>(ref_step(*call_, 0))];
    List elems = distinct_elements(in);
    Base eb = elems.empty() ? tp_.types[ref_step(*call_, 0)].base : *elems[0].scalar_base();
    if (!is_gold() && !perturbed_) {
      auto gold_in = key_set(distinct_elements((*gold_)[static_cast<std::size_t>(ref_step(*call_, 0))]));
      for (const auto& x : elems) {
        if (!gold_in.count(scalar_key(x)) && !store_.has_membership(pred(), x) && rng_.chance(0.5)) add(x);
      }
      return true;
    }
    bool truth = is_gold() ? rng_.chance(0.5) : !(*gold_)[i_].as_boolean();
    if (is_gold() && p.bool_differs_from >= 0 && value_is(p.bool_differs_from, Base::kBoolean)) {
      truth = !(*vals_)[p.bool_differs_from].as_boolean();
    }
    List members;
    if (truth) {
      members = elems;
    } else if (!elems.empty()) {
      members = elems;
      rng_.shuffle(members);
      members.resize(rng_.below(elems.size()));
    }
    auto mk = key_set(members);
    for (const auto& x : elems) {
      if (mk.count(scalar_key(x)) && !store_.has_membership(pred(), x)) add(x);
    }
    if (is_gold()) {
      for (const auto& x : fresh_scalars(eb, 1, elems)) add(x);
    }
    return true;
  }
};

bool has_full_date_literal(const TypedProgram& tp, bool& any_date) {
  any_date = false;
  for (const auto& c : tp.calls) {
    for (const auto& a : c.args) {
      if (const auto* v = std::get_if<Value>(&a); v && v->is_date()) {
        any_date = true;
        return v->as_date().has_month_day();
      }
    }
  }
  return false;
}

std::string instance_id(const std::string& qid, int N, std::uint64_t seed) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(seed));
  return (qid.empty() ? std::string("q") : qid) + "-n" + std::to_string(N) + "-" + buf;
}

}  // namespace

std::set<int> feasible_cardinalities(const TypedProgram& program) {
  std::set<int> out;
  if (program.size() == 0) return out;
  if (program.answer_type().structure == Structure::kScalar) return {1};
  const auto& last = program.calls.back();
  if (last.primitive == P::kTopKHighest || last.primitive == P::kTopKLowest) {
    int k = literal_k(last, 2);
    if (k >= 1) out.insert(k);
    return out;
  }
  int lo = 1;
  if (last.primitive == P::kUnion) {
    bool select_operand = false;
    for (std::size_t slot = 0; slot < 2; ++slot) {
      int r = ref_step(last, slot);
      select_operand = select_operand || (r >= 0 && program.calls[r].primitive == P::kSelect);
    }
    lo = select_operand ? 3 : 2;
  }
  int s = static_cast<int>(program.size()) - 1;
  for (;;) {
    auto prim = program.calls[s].primitive;
    bool pass_through = prim == P::kSortAscending || prim == P::kSortDescending ||
                        prim == P::kSortKeysByValueAscending || prim == P::kSortKeysByValueDescending ||
                        prim == P::kDictKeys || prim == P::kDictValues ||
                        (prim == P::kProject && program.types[s].structure == Structure::kDict);
    if (!pass_through) break;
    int r = ref_step(program.calls[s], 0);
    if (r < 0) break;
    s = r;
  }
  if (program.calls[s].primitive == P::kSelect) lo = std::max(lo, 2);
  for (int n = lo; n <= 4; ++n) out.insert(n);
  return out;
}

bool accept(const Value& gold_final, const Value& distractor_final, const FactStore& store, int N,
            const GenerationConfig& cfg) {
  return cardinality(gold_final) == static_cast<std::size_t>(N) &&
         store.size() <= static_cast<std::size_t>(cfg.max_facts) && !(gold_final == distractor_final);
}

GenerationResult generate_instance(const GenerationRequest& request, int N, const GenerationConfig& cfg,
                                   const PredicatePool& pool_in, const TemplateSet& templates) {
  cfg.validate();
  GenerationResult res;
  Failure& f = res.failure;
  const TypedProgram& tp = request.program;
  const std::size_t n = tp.size();
  if (n == 0 || !cfg.answer_cardinalities.count(N) || !feasible_cardinalities(tp).count(N)) {
    f.reasons["infeasible_cardinality"] += 1;
    f.attempts = 1;
    return res;
  }

  PredicatePool pool = pool_in;
  std::set<std::string> program_preds;
  std::vector<std::size_t> grounding_steps;
  for (std::size_t i = 0; i < n; ++i) {
    if (!tp.calls[i].predicate) continue;
    pool.add(*tp.calls[i].predicate, tp.types[i], tp.calls[i].primitive);
    program_preds.insert(tp.calls[i].predicate->text());
    grounding_steps.push_back(i);
  }
  bool any_date = false;
  bool literal_full = has_full_date_literal(tp, any_date);

  for (int a = 0; a < cfg.max_retries; ++a) {
    f.attempts = a + 1;
    Rng rng(derive_seed(cfg.seed, "attempt", static_cast<std::uint64_t>(a)));
    auto fail = [&](const std::string& r) { f.reasons[r] += 1; };

    AttemptSettings s;
    bool late = a >= cfg.max_retries / 2;
    s.pool_min = late ? 2 : cfg.gold_pool_min;
    s.pool_max = late ? std::min(cfg.gold_pool_max, 4) : cfg.gold_pool_max;
    s.pool_max = std::max(s.pool_max, s.pool_min);
    s.dis_min = cfg.distractor_pool_min;
    s.dis_max = late ? cfg.distractor_pool_min : cfg.distractor_pool_max;
    s.full_dates = any_date ? literal_full : rng.chance(0.3);
    constexpr int kClasses[] = {0, 0, 1, 1, 2, 3};
    for (std::size_t i = 0; i < n; ++i) s.num_class.push_back(kClasses[rng.below(6)]);

    auto plan = plan_steps(tp, N, rng);

    PerturbationRecord rec;
    rec.steps.resize(n);
    auto try_perturb = [&](std::size_t i) {
      try {
        auto pp = perturb_predicate(*tp.calls[i].predicate, tp.types[i], pool, rng, tp.calls[i].primitive);
        if (program_preds.count(pp.predicate.text())) return false;
        rec.steps[i] = PerturbedStep{*tp.calls[i].predicate, pp.predicate, pp.mechanism};
        return true;
      } catch (const PoolExhausted&) {
        return false;
      }
    };
    for (auto i : grounding_steps) {
      if (rng.chance(cfg.step_perturb_probability)) try_perturb(i);
    }
    if (rec.empty()) {
      auto order = grounding_steps;
      rng.shuffle(order);
      for (auto i : order) {
        if (try_perturb(i)) break;
      }
    }
    if (rec.empty()) {
      fail("pool_exhausted");
      continue;
    }
    TypedProgram perturbed = rec.apply(tp);

    FactStore store;
    std::set<std::string> names;
    Builder b(tp, plan, s, store, rng, names);
    std::vector<Value> gold(n), dis(n);
    std::string reason;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = b.step(i, tp.calls[i], gold, nullptr, false, reason);
    for (std::size_t i = 0; i < n && ok; ++i) {
      ok = b.step(i, perturbed.calls[i], dis, &gold, rec.steps[i].has_value(), reason);
    }
    if (!ok) {
      fail(reason);
      continue;
    }
    std::vector<Value> gold_run, dis_run;
    try {
      gold_run = execute_steps(tp, store);
    } catch (const ExecError&) {
      fail("gold_changed");
      continue;
    }
    if (gold_run != gold) {
      fail("gold_changed");
      continue;
    }
    try {
      dis_run = execute_steps(perturbed, store);
    } catch (const ExecError& e) {
      fail(std::string("distractor_") + to_string(e.kind()));
      continue;
    }
    if (cardinality(gold_run.back()) != static_cast<std::size_t>(N)) {
      fail("cardinality");
      continue;
    }
    if (store.size() > static_cast<std::size_t>(cfg.max_facts)) {
      fail("too_many_facts");
      continue;
    }
    if (gold_run.back() == dis_run.back()) {
      fail("same_answer");
      continue;
    }

    QAInstance inst;
    inst.id = instance_id(request.question_id, N, cfg.seed);
    inst.question = request.question;
    Rng ctx(derive_seed(cfg.seed, "context", static_cast<std::uint64_t>(a)));
    inst.context = render_context(store, ctx, templates);
    inst.answers = answer_strings(gold_run.back());
    inst.program = tp;
    inst.pattern = pattern_signature(tp);
    inst.num_facts = static_cast<int>(store.size());
    inst.cardinality = N;
    inst.question_id = request.question_id;
    inst.source_dataset = request.source_dataset;
    inst.seed = cfg.seed;
    inst.perturbation = rec;
    inst.distractor_answers = answer_strings(dis_run.back());

    auto report = check_instance(inst, store);
    if (!report.pass()) {
      if (!report.p1.pass) fail("p1");
      else if (!report.p2.pass) fail("p2");
      else if (!report.p3.pass) fail("p3");
      else fail("answer_mismatch");
      continue;
    }
    res.generated = GeneratedInstance{std::move(inst), std::move(store), a + 1};
    return res;
  }
  return res;
}

GenerationResult generate_instance(std::string_view question, const Decomposition& d, int N,
                                   const GenerationConfig& cfg, const PredicatePool& pool,
                                   const TemplateSet& templates) {
  GenerationRequest req;
  req.question = std::string(question);
  req.question_id = d.question_id;
  req.source_dataset = d.source_dataset;
  Decomposition dq = d;
  dq.question_text = req.question;
  req.program = compile(dq);
  return generate_instance(req, N, cfg, pool, templates);
}

bool ground_predicate(const TypedProgram& program, int step, ChainState& state, FactStore& store, Rng& rng,
                      int want) {
  std::size_t i = static_cast<std::size_t>(step - 1);
  if (i >= program.size() || !is_grounding(program.calls[i].primitive)) return false;
  std::vector<StepPlan> plan(program.size());
  plan[i].want = want;
  AttemptSettings s;
  s.num_class.assign(program.size(), 0);
  for (auto& c : s.num_class) c = static_cast<int>(rng.below(4));
  std::set<std::string> names;
  for (const auto& fact : store.facts()) {
    if (fact.subject.is_entity()) names.insert(fact.subject.as_entity());
    if (fact.object && fact.object->is_entity()) names.insert(fact.object->as_entity());
  }
  state.ans.resize(program.size());
  Builder b(program, plan, s, store, rng, names);
  std::string reason;
  return b.step(i, program.calls[i], state.ans, nullptr, false, reason);
}

}  // namespace synthqa
