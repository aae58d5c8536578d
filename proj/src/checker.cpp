#include "synthqa/checker.hpp"

#include <set>

#include "synthqa/errors.hpp"
#include "synthqa/reference.hpp"

namespace synthqa {

namespace {

using KeySet = std::set<std::string>;

KeySet keys_of(const List& l) {
  KeySet s;
  for (const auto& v : l) s.insert(scalar_key(v));
  return s;
}

KeySet keys_of(const Value& v) {
  if (v.is_list()) return keys_of(v.as_list());
  KeySet s;
  if (v.is_dict()) {
    for (const auto& e : v.as_dict()) s.insert(scalar_key(e.key));
  } else {
    s.insert(scalar_key(v));
  }
  return s;
}

bool proper_subset(const KeySet& a, const KeySet& b) {
  if (a.size() >= b.size()) return false;
  for (const auto& x : a) {
    if (!b.count(x)) return false;
  }
  return true;
}

const Value& ref_value(const PrimitiveCall& call, std::size_t slot, const std::vector<Value>& steps) {
  return steps[static_cast<std::size_t>(std::get<StepRef>(call.args[slot]).step - 1)];
}

bool is_ref(const PrimitiveCall& call, std::size_t slot) {
  return slot < call.args.size() && std::holds_alternative<StepRef>(call.args[slot]);
}

void violate(PropertyReport& r, int step, const std::string& why) {
  r.pass = false;
  r.violating_steps.push_back(step);
  if (!r.detail.empty()) r.detail += "; ";
  r.detail += "step " + std::to_string(step) + ": " + why;
}

// Gold step values, or a failed report when the program does not run.
bool run_gold(const QAInstance& inst, const FactStore& store, std::vector<Value>& out, PropertyReport& r) {
  try {
    out = reference::execute_steps(inst.program, store);
    return true;
  } catch (const ExecError& e) {
    violate(r, e.step(), e.what());
    return false;
  }
}

bool p2_step(const PrimitiveCall& call, const Value& out, const std::vector<Value>& steps, std::string& why) {
  using P = PrimitiveId;
  switch (call.primitive) {
    case P::kFilter:
      if (!proper_subset(keys_of(out), keys_of(ref_value(call, 0, steps)))) {
        why = "filter keeps its whole input";
        return false;
      }
      return true;
    case P::kFilterCompared:
      if (!proper_subset(keys_of(out), keys_of(ref_value(call, 0, steps)))) {
        why = "comparison keeps every key";
        return false;
      }
      return true;
    case P::kArgmax:
    case P::kArgmin:
    case P::kKthHighest:
    case P::kKthLowest:
    case P::kTopKHighest:
    case P::kTopKLowest:
      if (!proper_subset(keys_of(out), keys_of(ref_value(call, 0, steps)))) {
        why = "superlative keeps every key";
        return false;
      }
      return true;
    case P::kSelectLarger:
    case P::kSelectSmaller:
    case P::kLogicalAnd:
    case P::kLogicalOr:
      if (ref_value(call, 0, steps) == ref_value(call, 1, steps)) {
        why = "both inputs are equal";
        return false;
      }
      return true;
    case P::kListMax:
    case P::kListMin:
    case P::kListSum:
    case P::kListAverage:
    case P::kListMedian:
    case P::kTakeKth:
      if (cardinality(ref_value(call, 0, steps)) < 2) {
        why = "reduces a single element";
        return false;
      }
      return true;
    case P::kSortAscending:
    case P::kSortDescending:
    case P::kSortKeysByValueAscending:
    case P::kSortKeysByValueDescending:
      if (out == ref_value(call, 0, steps)) {
        why = "input is already in order";
        return false;
      }
      return true;
    case P::kProject:
      if (out.is_dict()) {
        bool identity = true;
        for (const auto& e : out.as_dict()) identity = identity && e.key == e.value;
        if (identity) {
          why = "projection maps every key to itself";
          return false;
        }
      }
      break;
    case P::kUnion:
    case P::kIntersection:
    case P::kDiscard: {
      auto o = keys_of(out);
      for (std::size_t i = 0; i < 2; ++i) {
        if (o == keys_of(ref_value(call, i, steps))) {
          why = "set operation returns an operand";
          return false;
        }
      }
      return true;
    }
    default:
      break;
  }
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (is_ref(call, i) && out == ref_value(call, i, steps)) {
      why = "output equals input #" + std::to_string(std::get<StepRef>(call.args[i]).step);
      return false;
    }
  }
  return true;
}

}  // namespace

PropertyReport check_p1(const QAInstance& inst, const FactStore& store) {
  PropertyReport r;
  std::vector<Value> steps;
  if (!run_gold(inst, store, steps, r)) return r;
  for (std::size_t i = 0; i < inst.program.size(); ++i) {
    const auto& call = inst.program.calls[i];
    int step = static_cast<int>(i) + 1;
    if (!is_grounding(call.primitive) || call.refs().empty()) continue;
    const auto& pred = call.predicate->text();
    const auto& out = steps[i];
    switch (call.primitive) {
      case PrimitiveId::kFilter:
        if (!proper_subset(keys_of(out), keys_of(store.members(pred)))) violate(r, step, "filter answer is every member");
        break;
      case PrimitiveId::kProject:
        if (!proper_subset(keys_of(out.is_dict() ? out : ref_value(call, 0, steps)), keys_of(store.subjects(pred)))) {
          violate(r, step, "projection covers every subject");
        }
        break;
      case PrimitiveId::kBoolean: {
        auto input = keys_of(ref_value(call, 0, steps));
        bool outside = false;
        for (const auto& k : keys_of(store.members(pred))) outside = outside || !input.count(k);
        if (!outside) violate(r, step, "no member outside the input");
        break;
      }
      default:
        break;
    }
  }
  return r;
}

PropertyReport check_p2(const QAInstance& inst, const FactStore& store) {
  PropertyReport r;
  std::vector<Value> steps;
  if (!run_gold(inst, store, steps, r)) return r;
  for (std::size_t i = 0; i < inst.program.size(); ++i) {
    const auto& call = inst.program.calls[i];
    if (call.refs().empty()) continue;
    std::string why;
    if (!p2_step(call, steps[i], steps, why)) violate(r, static_cast<int>(i) + 1, why);
  }
  return r;
}

PropertyReport check_p3(const QAInstance& inst, const FactStore& store) {
  if (inst.perturbation.empty()) throw MissingPerturbationRecord("instance " + inst.id + " has no perturbed step");
  PropertyReport r;
  auto perturbed = inst.perturbation.apply(inst.program);
  std::vector<Value> steps;
  try {
    steps = reference::execute_steps(perturbed, store);
  } catch (const ExecError& e) {
    violate(r, e.step(), std::string("contrastive program fails: ") + e.what());
    return r;
  }
  if (answer_strings(steps.back()) == inst.answers) {
    violate(r, static_cast<int>(perturbed.size()), "contrastive answer equals the gold answer");
  }
  return r;
}

CheckReport check_instance(const QAInstance& inst, const FactStore& store) {
  CheckReport c;
  c.p1 = check_p1(inst, store);
  c.p2 = check_p2(inst, store);
  try {
    c.p3 = check_p3(inst, store);
  } catch (const MissingPerturbationRecord& e) {
    c.p3.pass = false;
    c.p3.detail = e.what();
  }
  try {
    c.answers_match = answer_strings(reference::execute_steps(inst.program, store).back()) == inst.answers;
  } catch (const ExecError&) {
    c.answers_match = false;
  }
  return c;
}

}  // namespace synthqa
