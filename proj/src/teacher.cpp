#include "synthqa/teacher.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "synthqa/errors.hpp"
#include "synthqa/interpreter.hpp"
#include "synthqa/mentions.hpp"
#include "synthqa/reference.hpp"

namespace synthqa {

namespace {

using P = PrimitiveId;

constexpr std::array<std::string_view, 12> kAdjectives = {"red",    "blue",   "green",  "large",
                                                          "small",  "active", "listed", "marked",
                                                          "open",   "closed", "shared", "new"};
constexpr std::array<std::string_view, 4> kStatements = {"P", "Q", "R", "S"};
constexpr std::array<std::string_view, 4> kLetters = {"A", "B", "C", "D"};

const char* comparator_words(Comparator c) {
  switch (c) {
    case Comparator::kGt: return "larger than";
    case Comparator::kLt: return "smaller than";
    case Comparator::kGe: return "at least";
    case Comparator::kLe: return "at most";
    case Comparator::kEq: return "equal to";
  }
  return "";
}

class ProblemBuilder {
 public:
  ProblemBuilder(PrimitiveId prim, Rng& rng) : rng_(rng) { problem_.primitive = prim; }

  std::string entity() {
    for (;;) {
      std::string s(3, 'A');
      for (auto& c : s) c = static_cast<char>('A' + rng_.below(26));
      if (names_.insert(s).second) return s;
    }
  }
  std::vector<std::string> entities(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(entity());
    return out;
  }
  // Integers and two-decimal values below one million.
  double number() {
    if (rng_.chance(0.5)) return static_cast<double>(rng_.uniform_int(1, 999999));
    return static_cast<double>(rng_.uniform_int(1, 99999999)) / 100.0;
  }
  double small_number() { return static_cast<double>(rng_.uniform_int(1, 999)); }
  std::vector<double> distinct_numbers(int n) {
    std::set<double> seen;
    std::vector<double> out;
    while (static_cast<int>(out.size()) < n) {
      double x = number();
      if (seen.insert(x).second) out.push_back(x);
    }
    return out;
  }
  Date date() {
    Date d{rng_.uniform_int(1100, 2022), rng_.uniform_int(1, 12), 0};
    d.day = rng_.uniform_int(1, 28);
    return d;
  }
  std::string adjective() {
    for (;;) {
      std::string a(kAdjectives[rng_.below(kAdjectives.size())]);
      if (used_preds_.insert(a).second) return a;
    }
  }

  void visible(std::string family, std::string pred, Value subject, std::optional<Value> object = std::nullopt) {
    visible_.push_back(Fact{Predicate(std::move(pred)), std::move(family), std::move(subject), std::move(object)});
  }
  void hidden(std::string pred, Value subject) {
    hidden_.push_back(Fact{Predicate(std::move(pred)), std::string(kHiddenFamily), std::move(subject), std::nullopt});
  }
  void member(const std::string& e, const std::string& pred) { visible("teacher_member", pred, Value::entity(e)); }
  void value(const std::string& e, double v) {
    visible("teacher_value", "value", Value::entity(e), Value::number(v));
  }
  void date_of(const std::string& e, const Date& d) {
    visible("teacher_date", "date", Value::entity(e), Value::date(d));
  }

  int step(PrimitiveId prim, std::vector<Arg> args, ValueType type, std::optional<std::string> pred = std::nullopt) {
    PrimitiveCall c;
    c.primitive = prim;
    if (pred) c.predicate = Predicate(*pred);
    c.args = std::move(args);
    int index = static_cast<int>(problem_.program.calls.size()) + 1;
    c.step_index = index;
    problem_.program.calls.push_back(std::move(c));
    problem_.program.types.push_back(type);
    return index;
  }
  int select(const std::string& pred, ValueType type) { return step(P::kSelect, {}, type, pred); }
  int project(int ref, const std::string& pred, ValueType type) { return step(P::kProject, {StepRef{ref}}, type, pred); }

  std::map<std::string, std::string, std::less<>>& slots() { return problem_.slots; }
  Rng& rng() { return rng_; }

  PrimitiveProblem finish() {
    rng_.shuffle(visible_);
    for (auto& f : hidden_) problem_.store.add(f);
    problem_.grouped.assign(hidden_.size(), false);
    for (auto& f : visible_) {
      bool big = (f.subject.is_number() && f.subject.as_number() >= 1000) ||
                 (f.object && f.object->is_number() && f.object->as_number() >= 1000);
      problem_.grouped.push_back(big && rng_.chance(0.5));
      problem_.store.add(f);
    }
    return std::move(problem_);
  }

 private:
  Rng& rng_;
  PrimitiveProblem problem_;
  std::set<std::string> names_;
  std::set<std::string> used_preds_;
  std::vector<Fact> visible_;
  std::vector<Fact> hidden_;
};

const ValueType kEntList = ValueType::list(Base::kEntity);
const ValueType kEnt = ValueType::scalar(Base::kEntity);
const ValueType kNum = ValueType::scalar(Base::kNumber);
const ValueType kNumList = ValueType::list(Base::kNumber);
const ValueType kNumDict = ValueType::dict(Base::kEntity, Base::kNumber);
const ValueType kDateT = ValueType::scalar(Base::kDate);
const ValueType kBool = ValueType::scalar(Base::kBoolean);

// Hidden list of every valued entity, a value dictionary over it, and one unrelated fact.
struct Valued {
  std::vector<std::string> names;
  std::vector<double> values;
  int keys = 0;
  int dict = 0;
};

Valued valued_entities(ProblemBuilder& b, int n, bool distinct = true) {
  Valued v;
  v.names = b.entities(n);
  if (distinct) {
    v.values = b.distinct_numbers(n);
  } else {
    for (int i = 0; i < n; ++i) v.values.push_back(b.number());
  }
  for (int i = 0; i < n; ++i) {
    b.hidden("entities", Value::entity(v.names[i]));
    b.value(v.names[i], v.values[i]);
  }
  b.member(b.entity(), b.adjective());
  v.keys = b.select("entities", kEntList);
  v.dict = b.project(v.keys, "value", kNumDict);
  return v;
}

// Entities split into those with pred (shown) and others with a different adjective.
struct Split {
  std::string pred;
  std::vector<std::string> in, out;
};

Split membership(ProblemBuilder& b, int in, int out) {
  Split s;
  s.pred = b.adjective();
  std::string other = b.adjective();
  s.in = b.entities(in);
  s.out = b.entities(out);
  for (const auto& e : s.in) b.member(e, s.pred);
  for (const auto& e : s.out) b.member(e, other);
  return s;
}

// Filter over every entity in the context; an empty answer keeps the
// predicate grounded through a hidden fact outside the candidates.
int counted_filter(ProblemBuilder& b, int in, int out) {
  auto s = membership(b, in, out);
  for (const auto& e : s.in) b.hidden("entities", Value::entity(e));
  for (const auto& e : s.out) b.hidden("entities", Value::entity(e));
  if (in == 0) b.hidden(s.pred, Value::entity(b.entity()));
  b.slots()["pred"] = s.pred;
  int keys = b.select("entities", kEntList);
  return b.step(P::kFilter, {StepRef{keys}}, kEntList, s.pred);
}

// Scalar named "number X" shown as "Number X is 35."
int named_number(ProblemBuilder& b, std::string_view letter, double v) {
  std::string pred = "number " + std::string(letter);
  b.visible("teacher_scalar", pred, Value::number(v));
  return b.select(pred, kNum);
}

// Entity picked by a hidden fact, then its attribute.
int attribute_of(ProblemBuilder& b, const std::string& e, const std::string& hidden_pred, const std::string& attr,
                 const ValueType& t) {
  b.hidden(hidden_pred, Value::entity(e));
  int s = b.select(hidden_pred, kEnt);
  return b.project(s, attr, t);
}

void build(ProblemBuilder& b, PrimitiveId prim) {
  auto& rng = b.rng();
  auto& slots = b.slots();
  switch (prim) {
    case P::kSelect: {
      auto s = membership(b, rng.uniform_int(1, 4), rng.uniform_int(1, 3));
      slots["pred"] = s.pred;
      b.select(s.pred, kEntList);
      return;
    }
    case P::kProject: {
      auto names = b.entities(rng.uniform_int(2, 4));
      for (const auto& e : names) b.value(e, b.number());
      slots["a"] = names[0];
      attribute_of(b, names[0], "target", "value", kNum);
      return;
    }
    case P::kFilter: {
      std::string pred = b.adjective(), pred2 = b.adjective();
      auto listed = b.entities(rng.uniform_int(2, 5));
      int keep = rng.uniform_int(1, static_cast<int>(listed.size()) - 1);
      for (const auto& e : listed) b.member(e, pred2);
      for (int i = 0; i < keep; ++i) b.member(listed[i], pred);
      b.member(b.entity(), pred);
      slots["pred"] = pred;
      slots["pred2"] = pred2;
      int s = b.select(pred2, kEntList);
      b.step(P::kFilter, {StepRef{s}}, kEntList, pred);
      return;
    }
    case P::kBoolean: {
      auto s = membership(b, rng.uniform_int(1, 3), rng.uniform_int(1, 3));
      const auto& target = rng.chance(0.5) ? s.in[0] : s.out[0];
      slots["a"] = target;
      slots["pred"] = s.pred;
      b.hidden("target", Value::entity(target));
      int t = b.select("target", kEnt);
      b.step(P::kBoolean, {StepRef{t}}, kBool, s.pred);
      return;
    }
    case P::kCount: {
      int f = counted_filter(b, rng.uniform_int(0, 5), rng.uniform_int(1, 3));
      b.step(P::kCount, {StepRef{f}}, kNum);
      return;
    }
    case P::kExists:
    case P::kIsEmpty: {
      int f = counted_filter(b, rng.chance(0.5) ? 0 : rng.uniform_int(1, 3), rng.uniform_int(1, 3));
      b.step(prim, {StepRef{f}}, kBool);
      return;
    }
    case P::kGroupedCount: {
      auto groups = b.entities(rng.uniform_int(2, 3));
      auto names = b.entities(rng.uniform_int(3, 6));
      for (const auto& e : names) {
        b.hidden("entities", Value::entity(e));
        b.visible("teacher_group", "group", Value::entity(e), Value::entity(rng.pick(groups)));
      }
      b.member(b.entity(), b.adjective());
      int keys = b.select("entities", kEntList);
      int d = b.project(keys, "group", ValueType::dict(Base::kEntity, Base::kEntity));
      b.step(P::kGroupedCount, {StepRef{keys}, StepRef{d}}, ValueType::dict(Base::kEntity, Base::kNumber));
      return;
    }
    case P::kListSum:
    case P::kListAverage:
    case P::kListMedian:
    case P::kListMax:
    case P::kListMin:
    case P::kSortAscending:
    case P::kSortDescending: {
      auto s = membership(b, rng.uniform_int(2, 5), rng.uniform_int(1, 3));
      for (const auto& e : s.in) b.value(e, b.number());
      for (const auto& e : s.out) b.value(e, b.number());
      slots["pred"] = s.pred;
      int keys = b.select(s.pred, kEntList);
      int d = b.project(keys, "value", kNumDict);
      if (prim == P::kSortAscending || prim == P::kSortDescending) {
        int vals = b.step(P::kDictValues, {StepRef{d}}, kNumList);
        b.step(prim, {StepRef{vals}}, kNumList);
      } else {
        b.step(prim, {StepRef{d}}, kNum);
      }
      return;
    }
    case P::kArithmeticSum:
    case P::kArithmeticDifference:
    case P::kArithmeticAbsoluteDifference:
    case P::kArithmeticMultiplication:
    case P::kArithmeticDivision:
    case P::kArithmeticPercentage: {
      bool small = prim == P::kArithmeticMultiplication;
      double x = small ? b.small_number() : b.number();
      double y = small ? b.small_number() : b.number();
      if (prim == P::kArithmeticPercentage && x > y) std::swap(x, y);
      std::size_t i = rng.below(kLetters.size()), j = (i + 1 + rng.below(kLetters.size() - 1)) % kLetters.size();
      std::size_t k = 0;
      while (k == i || k == j) ++k;
      slots["a"] = "number " + std::string(kLetters[i]);
      slots["b"] = "number " + std::string(kLetters[j]);
      int s1 = named_number(b, kLetters[i], x);
      int s2 = named_number(b, kLetters[j], y);
      b.visible("teacher_scalar", "number " + std::string(kLetters[k]), Value::number(b.number()));
      b.step(prim, {StepRef{s1}, StepRef{s2}}, kNum);
      return;
    }
    case P::kFilterCompared: {
      auto v = valued_entities(b, rng.uniform_int(2, 5));
      auto sorted = v.values;
      std::sort(sorted.begin(), sorted.end());
      std::size_t gap = rng.below(sorted.size() - 1);
      double lo = sorted[gap], hi = sorted[gap + 1];
      double thr = std::round((lo + (hi - lo) * (0.05 + 0.9 * rng.uniform01())) * 100.0) / 100.0;
      if (thr <= lo || thr >= hi) thr = lo;
      Comparator c = std::array{Comparator::kGt, Comparator::kLt, Comparator::kGe, Comparator::kLe}[rng.below(4)];
      slots["cmp"] = comparator_words(c);
      slots["thr"] = format_number(thr);
      b.step(P::kFilterCompared, {StepRef{v.dict}, c, Value::number(thr)}, kEntList);
      return;
    }
    case P::kArgmax:
    case P::kArgmin:
    case P::kSortKeysByValueAscending:
    case P::kSortKeysByValueDescending: {
      auto v = valued_entities(b, rng.uniform_int(2, 5));
      b.step(prim, {StepRef{v.keys}, StepRef{v.dict}}, kEntList);
      return;
    }
    case P::kKthHighest:
    case P::kKthLowest:
    case P::kTopKHighest:
    case P::kTopKLowest: {
      auto v = valued_entities(b, rng.uniform_int(3, 6));
      int k = rng.uniform_int(2, static_cast<int>(v.names.size()) - 1);
      slots["k"] = prim == P::kKthHighest || prim == P::kKthLowest ? ordinal_like("1st", k) : std::to_string(k);
      b.step(prim, {StepRef{v.keys}, StepRef{v.dict}, Value::number(k)}, kEntList);
      return;
    }
    case P::kUnion:
    case P::kIntersection:
    case P::kDiscard: {
      std::string pred = b.adjective(), pred2 = b.adjective();
      auto only1 = b.entities(rng.uniform_int(1, 2));
      auto both = b.entities(rng.uniform_int(1, 2));
      auto only2 = b.entities(rng.uniform_int(1, 2));
      for (const auto& e : only1) b.member(e, pred);
      for (const auto& e : both) {
        b.member(e, pred);
        b.member(e, pred2);
      }
      for (const auto& e : only2) b.member(e, pred2);
      b.member(b.entity(), b.adjective());
      slots["pred"] = pred;
      slots["pred2"] = pred2;
      int s1 = b.select(pred, kEntList);
      int s2 = b.select(pred2, kEntList);
      b.step(prim, {StepRef{s1}, StepRef{s2}}, kEntList);
      return;
    }
    case P::kDateDifferenceInYears:
    case P::kDateDifferenceInMonths:
    case P::kDateDifferenceInDays: {
      auto names = b.entities(3);
      for (const auto& e : names) b.date_of(e, b.date());
      slots["a"] = names[0];
      slots["b"] = names[1];
      int d1 = attribute_of(b, names[0], "first", "date", kDateT);
      int d2 = attribute_of(b, names[1], "second", "date", kDateT);
      b.step(prim, {StepRef{d1}, StepRef{d2}}, kNum);
      return;
    }
    case P::kExtractYear: {
      auto names = b.entities(rng.uniform_int(2, 3));
      for (const auto& e : names) b.date_of(e, b.date());
      slots["a"] = names[0];
      int d = attribute_of(b, names[0], "target", "date", kDateT);
      b.step(prim, {StepRef{d}}, kNum);
      return;
    }
    case P::kLogicalAnd:
    case P::kLogicalOr:
    case P::kLogicalNot: {
      std::vector<std::string_view> names(kStatements.begin(), kStatements.end());
      rng.shuffle(names);
      std::vector<int> refs;
      int used = prim == P::kLogicalNot ? 1 : 2;
      for (int i = 0; i < 3; ++i) {
        std::string pred(names[static_cast<std::size_t>(i)]);
        b.visible("teacher_flag", pred, Value::boolean(rng.chance(0.5)));
        if (i < used) {
          slots[i == 0 ? "a" : "b"] = pred;
          refs.push_back(b.select(pred, kBool));
        }
      }
      std::vector<Arg> args;
      for (int r : refs) args.emplace_back(StepRef{r});
      b.step(prim, std::move(args), kBool);
      return;
    }
    case P::kBooleanComparison: {
      auto names = b.entities(rng.uniform_int(2, 3));
      std::vector<double> vals;
      for (const auto& e : names) {
        vals.push_back(b.number());
        b.value(e, vals.back());
      }
      double thr = rng.chance(0.5) ? vals[0] : b.number();
      Comparator c = std::array{Comparator::kGt, Comparator::kLt, Comparator::kGe, Comparator::kLe}[rng.below(4)];
      slots["a"] = "the value of " + names[0];
      slots["cmp"] = comparator_words(c);
      slots["thr"] = format_number(thr);
      int v = attribute_of(b, names[0], "target", "value", kNum);
      b.step(prim, {StepRef{v}, c, Value::number(thr)}, kBool);
      return;
    }
    case P::kTakeKth: {
      auto s = membership(b, rng.uniform_int(2, 5), rng.uniform_int(1, 2));
      int k = rng.uniform_int(1, static_cast<int>(s.in.size()));
      slots["pred"] = s.pred;
      slots["k"] = ordinal_like("1st", k);
      int l = b.select(s.pred, kEntList);
      b.step(prim, {StepRef{l}, Value::number(k)}, kEnt);
      return;
    }
    case P::kSelectLarger:
    case P::kSelectSmaller: {
      auto names = b.entities(3);
      auto vals = b.distinct_numbers(3);
      for (int i = 0; i < 3; ++i) b.value(names[static_cast<std::size_t>(i)], vals[static_cast<std::size_t>(i)]);
      slots["a"] = "the value of " + names[0];
      slots["b"] = "the value of " + names[1];
      int v1 = attribute_of(b, names[0], "first", "value", kNum);
      int v2 = attribute_of(b, names[1], "second", "value", kNum);
      b.step(prim, {StepRef{v1}, StepRef{v2}}, kNum);
      return;
    }
    case P::kDictKeys:
    case P::kDictValues: {
      auto v = valued_entities(b, rng.uniform_int(2, 5), false);
      b.step(prim, {StepRef{v.dict}}, prim == P::kDictKeys ? kEntList : kNumList);
      return;
    }
    case P::kCopy:
      break;
  }
  throw NoTemplate(std::string(name(prim)));
}

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

PrimitiveProblem sample_primitive_problem(PrimitiveId primitive, Rng& rng) {
  ProblemBuilder b(primitive, rng);
  build(b, primitive);
  return b.finish();
}

QAInstance render_primitive_problem(const PrimitiveProblem& problem, std::size_t question_template,
                                    const TemplateSet& templates) {
  auto prim_name = std::string(name(problem.primitive));
  const auto& qs = templates.questions(prim_name);
  if (qs.empty()) throw NoTemplate(prim_name);

  auto values = execute_steps(problem.program, problem.store);
  auto oracle = reference::execute_steps(problem.program, problem.store);
  if (values.back() != oracle.back()) throw Error("reference interpreter disagrees on " + prim_name);

  QAInstance inst;
  inst.question = capitalized(fill(qs[question_template % qs.size()], problem.slots));
  int visible = 0;
  const auto& facts = problem.store.facts();
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (facts[i].family == kHiddenFamily) continue;
    if (!inst.context.empty()) inst.context += ' ';
    bool grouped = i < problem.grouped.size() && problem.grouped[i];
    inst.context += render_fact(facts[i], templates, grouped);
    ++visible;
  }
  inst.answers = answer_strings(values.back());
  inst.program = problem.program;
  inst.pattern = prim_name;
  inst.num_facts = visible;
  inst.cardinality = static_cast<int>(cardinality(values.back()));
  inst.question_id = "primitive_" + prim_name;
  inst.source_dataset = "primitive";
  return inst;
}

void generate_primitive_instances(PrimitiveId primitive, std::uint64_t train_count, std::uint64_t dev_count,
                                  std::uint64_t seed, const TeacherSink& sink, const TemplateSet& templates) {
  auto prim_name = std::string(name(primitive));
  if (templates.questions(prim_name).empty()) throw NoTemplate(prim_name);
  for (const char* split : {"train", "dev"}) {
    std::uint64_t n = std::string_view(split) == "train" ? train_count : dev_count;
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint64_t s = derive_seed(seed, prim_name + "/" + split, i);
      Rng rng(s);
      auto problem = sample_primitive_problem(primitive, rng);
      auto inst = render_primitive_problem(problem, rng.below(templates.questions(prim_name).size()), templates);
      inst.id = prim_name + "-" + split + "-" + std::to_string(i);
      inst.seed = s;
      inst.split = split;
      sink(inst);
    }
  }
}

}  // namespace synthqa
