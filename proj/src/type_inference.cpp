#include "synthqa/type_inference.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <span>
#include <sstream>

#include "synthqa/errors.hpp"

namespace synthqa {

std::string_view to_string(TypeOrigin o) {
  switch (o) {
    case TypeOrigin::kSignature: return "signature";
    case TypeOrigin::kKeyword: return "keyword";
    case TypeOrigin::kDefault: return "default";
  }
  return "?";
}

namespace {

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '#' || c == '\'') {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool in(std::string_view w, std::span<const std::string_view> set) {
  return std::find(set.begin(), set.end(), w) != set.end();
}
bool in(std::string_view w, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), w) != set.end();
}

bool contains_phrase(const std::vector<std::string>& ws, std::initializer_list<std::string_view> phrase) {
  auto n = phrase.size();
  for (std::size_t i = 0; i + n <= ws.size(); ++i) {
    if (std::equal(phrase.begin(), phrase.end(), ws.begin() + static_cast<long>(i))) return true;
  }
  return false;
}

constexpr std::string_view kChunkBreaks[] = {
    "of",    "by",  "in",   "on",     "at",      "for",   "from",  "with",   "to",    "into",
    "during", "that", "which", "who",  "whose",   "where", "when",  "than",   "and",   "or",
    "as",    "against", "over", "under", "between", "after", "before", "per", "about", "since",
    "did",   "does", "do",   "is",     "are",     "was",   "were",  "has",    "have",  "had"};

constexpr std::string_view kDeterminers[] = {"the", "a", "an", "all", "each", "every",
                                                                  "some", "any", "those", "these", "his", "her",
                                                                  "their", "its"};

constexpr std::string_view kNumberNouns[] = {
    "yards",   "yard",     "points",   "point",      "percent",  "percentage", "population", "age",
    "ages",    "height",   "heights",  "length",     "lengths",  "distance",   "distances",  "size",
    "area",    "weight",   "score",    "scores",     "amount",   "amounts",    "total",      "sum",
    "salary",  "price",    "prices",   "cost",       "costs",    "revenue",    "attendance", "capacity",
    "margin",  "rating",   "ratings",  "yardage",    "seconds",  "minutes",    "hours",      "lines",
    "line",    "value",    "values",   "elevation",  "depth",    "width",      "budget",     "income",
    "gdp",     "count",    "counts",   "number",     "numbers",  "quantity",   "rate",       "rates"};

constexpr std::string_view kDateNouns[] = {"date", "dates", "year", "years", "day",
                                                                "birthday", "birthdate", "anniversary"};

}  // namespace

bool is_plural_noun(std::string_view w) {
  if (in(w, {"people", "men", "women", "children", "teeth", "feet", "mice", "data", "media"})) return true;
  if (w.size() < 3 || w.back() != 's') return false;
  return !(w.ends_with("ss") || w.ends_with("us") || w.ends_with("is") || w.ends_with("'s"));
}

std::string head_noun(std::string_view text) {
  auto ws = words(text);
  std::size_t i = 0;
  while (i < ws.size() && in(ws[i], kDeterminers)) ++i;
  std::string head;
  for (; i < ws.size(); ++i) {
    const auto& w = ws[i];
    if (in(w, kChunkBreaks) || w.front() == '#') break;
    if (!head.empty() && w.size() > 4 && w.ends_with("ing")) break;
    head = w;
  }
  return head;
}

std::optional<TypeHint> keyword_type_hint(const Predicate& predicate, std::optional<Structure> ref_structure) {
  auto ws = words(predicate.text());
  if (ws.empty()) return std::nullopt;
  TypeHint h;
  bool counted = contains_phrase(ws, {"number", "of"}) || contains_phrase(ws, {"how", "many"}) ||
                 contains_phrase(ws, {"how", "much"}) || contains_phrase(ws, {"count", "of"}) ||
                 contains_phrase(ws, {"amount", "of"}) || contains_phrase(ws, {"total", "number"});
  std::string head = head_noun(predicate.text());
  if (counted) {
    h.base = Base::kNumber;
    h.base_origin = TypeOrigin::kKeyword;
    h.structure = Structure::kScalar;
    h.structure_origin = TypeOrigin::kKeyword;
  } else if (ws.front() == "when" || contains_phrase(ws, {"what", "year"}) || in(head, kDateNouns)) {
    h.base = Base::kDate;
    h.base_origin = TypeOrigin::kKeyword;
    if (ws.front() == "when") {
      h.structure = Structure::kScalar;
      h.structure_origin = TypeOrigin::kKeyword;
    }
  } else if (in(head, kNumberNouns)) {
    h.base = Base::kNumber;
    h.base_origin = TypeOrigin::kKeyword;
  }
  if (!h.structure && !head.empty()) {
    h.structure = is_plural_noun(head) ? Structure::kList : Structure::kScalar;
    h.structure_origin = TypeOrigin::kDefault;
  }
  if (ref_structure && predicate.text().find(kRefSlot) != std::string::npos) {
    // Per-element predicate: one value per referenced element.
    h.structure = *ref_structure;
    h.structure_origin = TypeOrigin::kSignature;
  }
  if (!h.base && !h.structure) return std::nullopt;
  return h;
}

namespace {

std::string describe_bases(BaseSet s) {
  std::string out;
  for (auto b : {Base::kNumber, Base::kDate, Base::kEntity, Base::kBoolean}) {
    if (s & bit(b)) {
      if (!out.empty()) out += '|';
      out += to_string(b);
    }
  }
  return out.empty() ? "none" : out;
}

std::string describe_structs(StructSet s) {
  std::string out;
  for (auto x : {Structure::kScalar, Structure::kList, Structure::kDict}) {
    if (s & bit(x)) {
      if (!out.empty()) out += '|';
      out += to_string(x);
    }
  }
  return out.empty() ? "none" : out;
}

bool is_year_literal(const Value& v) {
  if (!v.is_number()) return false;
  double x = v.as_number();
  return std::floor(x) == x && x >= kMinYear && x <= kMaxYear;
}

class Inference {
 public:
  Inference(const Program& p, std::string_view question, TypingTrace* trace)
      : p_(p), question_(question), trace_(trace), dom_(p.calls.size()) {
    lit_.resize(p.calls.size());
    for (std::size_t i = 0; i < p.calls.size(); ++i) {
      const auto& c = p.calls[i];
      lit_[i].assign(c.args.size(), 0);
      for (std::size_t j = 0; j < c.args.size(); ++j) {
        if (const auto* v = std::get_if<Value>(&c.args[j])) {
          if (v->is_date()) lit_[i][j] = bit(Base::kDate);
          else lit_[i][j] = is_year_literal(*v) ? kOrderedBases : bit(Base::kNumber);
        }
      }
    }
  }

  TypedProgram run() {
    validate_program(p_);
    propagate();
    apply_hints(TypeOrigin::kKeyword);
    propagate();
    apply_question_cue();
    propagate();
    for (std::size_t i = 0; i < dom_.size(); ++i) {
      choose_defaults(i);
      propagate();
    }
    return build();
  }

 private:
  struct Dom {
    BaseSet base = kAllBases;
    StructSet st = kAllStructures;
    BaseSet key = kGroundableBases;
    std::string why_base = "initial", why_st = "initial", why_key = "initial";
  };
  enum class Field { kBase, kStructure, kKey };

  bool narrow(std::size_t step, Field f, std::uint8_t mask, TypeOrigin origin, const std::string& why,
              TypeConstraint::Relation rel) {
    auto& d = dom_[step];
    auto& cur = f == Field::kBase ? d.base : (f == Field::kStructure ? d.st : d.key);
    auto& reason = f == Field::kBase ? d.why_base : (f == Field::kStructure ? d.why_st : d.why_key);
    std::uint8_t next = cur & mask;
    if (next == cur) return false;
    std::string desc = std::string(to_string(origin)) + ": " + why + " requires " +
                       (f == Field::kStructure ? describe_structs(mask) : describe_bases(mask)) +
                       (f == Field::kKey ? " keys" : "");
    if (next == 0) throw TypeConflict(static_cast<int>(step) + 1, reason, desc);
    cur = next;
    reason = desc;
    if (trace_) {
      trace_->constraints.push_back(TypeConstraint{
          static_cast<int>(step) + 1, rel,
          f == Field::kStructure ? describe_structs(mask) : describe_bases(mask), origin});
    }
    changed_ = true;
    return true;
  }

  static std::size_t ref_index(const Arg& a) { return static_cast<std::size_t>(std::get<StepRef>(a).step - 1); }

  std::string site(std::size_t i) const {
    return std::string(name(p_.calls[i].primitive)) + " at step " + std::to_string(i + 1);
  }

  void constrain_call(std::size_t i) {
    using R = TypeConstraint::Relation;
    const auto& c = p_.calls[i];
    const auto& sig = signature(c.primitive);
    const auto S = TypeOrigin::kSignature;
    for (std::size_t j = 0; j < c.args.size(); ++j) {
      const auto& slot = sig.inputs[j];
      if (!std::holds_alternative<StepRef>(c.args[j])) continue;
      auto r = ref_index(c.args[j]);
      narrow(r, Field::kStructure, slot.structures, S, "input " + std::to_string(j + 1) + " of " + site(i),
             R::kStructureIs);
      narrow(r, Field::kBase, slot.bases, S, "input " + std::to_string(j + 1) + " of " + site(i), R::kBaseIs);
    }
    if (sig.output.rule == OutputRule::kProject) {
      if (!c.args.empty()) {
        auto r = ref_index(c.args[0]);
        StructSet from_in = 0, to_in = 0;
        if (dom_[r].st & bit(Structure::kScalar)) from_in |= bit(Structure::kScalar);
        if (dom_[r].st & bit(Structure::kList)) from_in |= bit(Structure::kDict);
        if (dom_[i].st & bit(Structure::kScalar)) to_in |= bit(Structure::kScalar);
        if (dom_[i].st & bit(Structure::kDict)) to_in |= bit(Structure::kList);
        narrow(i, Field::kStructure, from_in, S, "input of " + site(i), R::kStructureIs);
        narrow(r, Field::kStructure, to_in, S, "output of " + site(i), R::kStructureIs);
      }
      narrow(i, Field::kStructure, sig.output.structures, S, site(i), R::kStructureIs);
    } else if (sig.output.rule == OutputRule::kSameAsSlot0) {
      if (!c.args.empty()) {
        auto r = ref_index(c.args[0]);
        narrow(i, Field::kStructure, dom_[r].st, S, site(i), R::kEquals);
        narrow(r, Field::kStructure, dom_[i].st, S, site(i), R::kEquals);
      }
    } else {
      narrow(i, Field::kStructure, sig.output.structures, S, site(i), R::kStructureIs);
    }
    narrow(i, Field::kBase, sig.output.bases, S, site(i), R::kBaseIs);

    // Type variables shared between slots and the output.
    for (char v : {'a', 'k', 'b'}) {
      BaseSet acc = kAllBases;
      bool used = false;
      for (std::size_t j = 0; j < c.args.size(); ++j) {
        const auto& slot = sig.inputs[j];
        bool is_ref = std::holds_alternative<StepRef>(c.args[j]);
        if (slot.base_var == v) {
          used = true;
          acc &= is_ref ? dom_[ref_index(c.args[j])].base : lit_[i][j];
        }
        if (slot.key_var == v && is_ref) {
          used = true;
          acc &= dom_[ref_index(c.args[j])].key;
        }
      }
      if (sig.output.base_var == v) {
        used = true;
        acc &= dom_[i].base;
      }
      if (sig.output.key_var == v) {
        used = true;
        acc &= dom_[i].key;
      }
      if (!used) continue;
      std::string why = "type variable '" + std::string(1, v) + "' of " + site(i);
      for (std::size_t j = 0; j < c.args.size(); ++j) {
        const auto& slot = sig.inputs[j];
        bool is_ref = std::holds_alternative<StepRef>(c.args[j]);
        if (slot.base_var == v) {
          if (is_ref) {
            narrow(ref_index(c.args[j]), Field::kBase, acc, S, why, R::kValueOf);
          } else {
            BaseSet next = lit_[i][j] & acc;
            if (next == 0) {
              throw TypeConflict(static_cast<int>(i) + 1, "literal argument " + std::to_string(j + 1),
                                 "signature: " + why + " requires " + describe_bases(acc));
            }
            if (next != lit_[i][j]) changed_ = true;
            lit_[i][j] = next;
          }
        }
        if (slot.key_var == v && is_ref) narrow(ref_index(c.args[j]), Field::kKey, acc, S, why, R::kKeyOf);
      }
      if (sig.output.base_var == v) narrow(i, Field::kBase, acc, S, why, R::kEquals);
      if (sig.output.key_var == v) narrow(i, Field::kKey, acc, S, why, R::kKeyOf);
    }
  }

  void propagate() {
    const int limit = static_cast<int>(dom_.size()) * 16 + 4;
    do {
      changed_ = false;
      for (std::size_t i = 0; i < dom_.size(); ++i) constrain_call(i);
      if (trace_) ++trace_->iterations;
      if (++rounds_ > limit * 8) throw Error("type propagation did not converge");
    } while (changed_);
  }

  std::optional<TypeHint> hint(std::size_t i) const {
    const auto& c = p_.calls[i];
    if (!c.predicate || (c.primitive != PrimitiveId::kSelect && c.primitive != PrimitiveId::kProject)) {
      return std::nullopt;
    }
    return keyword_type_hint(*c.predicate);
  }

  void apply_hints(TypeOrigin level) {
    using R = TypeConstraint::Relation;
    for (std::size_t i = 0; i < dom_.size(); ++i) {
      auto h = hint(i);
      if (!h) continue;
      std::string why = "predicate '" + p_.calls[i].predicate->text() + "'";
      if (h->base && h->base_origin == level) narrow(i, Field::kBase, bit(*h->base), level, why, R::kBaseIs);
      if (h->structure && h->structure_origin == level && p_.calls[i].primitive == PrimitiveId::kSelect) {
        narrow(i, Field::kStructure, bit(*h->structure), level, why, R::kStructureIs);
      }
    }
  }

  // Question wording only nudges an otherwise open final grounding step.
  void apply_question_cue() {
    std::size_t last = dom_.size() - 1;
    if (!is_grounding(p_.calls[last].primitive)) return;
    auto ws = words(question_);
    std::optional<Base> b;
    if (contains_phrase(ws, {"how", "many"}) || contains_phrase(ws, {"how", "much"})) b = Base::kNumber;
    else if (!ws.empty() && (ws.front() == "when" || contains_phrase(ws, {"what", "year"}))) b = Base::kDate;
    if (b && (dom_[last].base & bit(*b))) {
      narrow(last, Field::kBase, bit(*b), TypeOrigin::kKeyword, "question wording", TypeConstraint::Relation::kBaseIs);
    }
  }

  void choose_defaults(std::size_t i) {
    using R = TypeConstraint::Relation;
    auto& d = dom_[i];
    auto h = hint(i);
    auto pick = [](std::uint8_t set, std::optional<std::uint8_t> preferred, std::initializer_list<std::uint8_t> order) {
      if (preferred && (set & *preferred)) return *preferred;
      for (auto o : order) {
        if (set & o) return o;
      }
      return std::uint8_t{0};
    };
    const auto D = TypeOrigin::kDefault;
    if (std::popcount(static_cast<unsigned>(d.base)) > 1) {
      std::optional<std::uint8_t> pref;
      if (h && h->base) pref = bit(*h->base);
      narrow(i, Field::kBase,
             pick(d.base, pref, {bit(Base::kEntity), bit(Base::kNumber), bit(Base::kDate), bit(Base::kBoolean)}), D,
             "default", R::kBaseIs);
    }
    if (std::popcount(static_cast<unsigned>(d.st)) > 1) {
      std::optional<std::uint8_t> pref;
      if (h && h->structure) pref = bit(*h->structure);
      narrow(i, Field::kStructure,
             pick(d.st, pref, {bit(Structure::kList), bit(Structure::kScalar), bit(Structure::kDict)}), D,
             "default", R::kStructureIs);
    }
    if (std::popcount(static_cast<unsigned>(d.key)) > 1) {
      narrow(i, Field::kKey, pick(d.key, std::nullopt, {bit(Base::kEntity), bit(Base::kNumber), bit(Base::kDate)}), D,
             "default", R::kKeyOf);
    }
    // Literal year/number ambiguity resolves toward number unless a date is forced.
    for (auto& l : lit_[i]) {
      if (std::popcount(static_cast<unsigned>(l)) > 1) {
        l = bit(Base::kNumber);
        changed_ = true;
      }
    }
  }

  static Base single_base(BaseSet s) {
    for (auto b : {Base::kNumber, Base::kDate, Base::kEntity, Base::kBoolean}) {
      if (s == bit(b)) return b;
    }
    throw Error("unresolved base");
  }

  TypedProgram build() const {
    TypedProgram tp;
    tp.calls = p_.calls;
    for (std::size_t i = 0; i < dom_.size(); ++i) {
      const auto& d = dom_[i];
      Structure st = d.st == bit(Structure::kScalar) ? Structure::kScalar
                     : d.st == bit(Structure::kList) ? Structure::kList
                                                     : Structure::kDict;
      ValueType t{single_base(d.base), st, st == Structure::kDict ? single_base(d.key) : Base::kEntity};
      tp.types.push_back(t);
      for (std::size_t j = 0; j < tp.calls[i].args.size(); ++j) {
        auto* v = std::get_if<Value>(&tp.calls[i].args[j]);
        if (v && lit_[i][j] == bit(Base::kDate) && v->is_number()) {
          *v = Value::date(Date{static_cast<int>(v->as_number()), 0, 0});
        }
      }
    }
    return tp;
  }

  const Program& p_;
  std::string_view question_;
  TypingTrace* trace_;
  std::vector<Dom> dom_;
  std::vector<std::vector<BaseSet>> lit_;
  bool changed_ = false;
  int rounds_ = 0;
};

}  // namespace

TypedProgram infer_types(const Program& p, std::string_view question, TypingTrace* trace) {
  return Inference(p, question, trace).run();
}

std::string type_dump(const TypedProgram& tp) {
  std::ostringstream out;
  for (std::size_t i = 0; i < tp.calls.size(); ++i) {
    out << (i + 1) << '\t' << name(tp.calls[i].primitive) << '\t' << to_string(tp.types[i]) << '\n';
  }
  return out.str();
}

}  // namespace synthqa
