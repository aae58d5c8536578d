#include "synthqa/program.hpp"

#include <cmath>

#include "synthqa/errors.hpp"

namespace synthqa {

Predicate::Predicate(std::string text) : text_(std::move(text)), mentions_(detect_mentions(text_)) {}

std::vector<int> PrimitiveCall::refs() const {
  std::vector<int> out;
  for (const auto& a : args) {
    if (const auto* r = std::get_if<StepRef>(&a)) out.push_back(r->step);
  }
  return out;
}

namespace {

std::string describe(const PrimitiveCall& call, int step) {
  return "step " + std::to_string(step) + " (" + std::string(name(call.primitive)) + ")";
}

}  // namespace

void validate_call(const PrimitiveCall& call, int step) {
  const auto& sig = signature(call.primitive);
  if (sig.needs_grounding) {
    if (!call.predicate || call.predicate->empty()) {
      throw Error(describe(call, step) + ": grounding primitive needs a predicate");
    }
  } else if (call.predicate) {
    throw Error(describe(call, step) + ": only grounding primitives carry a predicate");
  }
  std::size_t required = 0;
  for (const auto& slot : sig.inputs) required += slot.optional ? 0 : 1;
  if (call.args.size() < required || call.args.size() > sig.inputs.size()) {
    throw Error(describe(call, step) + ": expected " + std::to_string(sig.inputs.size()) + " arguments, got " +
                std::to_string(call.args.size()));
  }
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    const auto& arg = call.args[i];
    bool ok = false;
    switch (sig.inputs[i].kind) {
      case SlotKind::kRef:
        ok = std::holds_alternative<StepRef>(arg);
        break;
      case SlotKind::kComparator:
        ok = std::holds_alternative<Comparator>(arg);
        break;
      case SlotKind::kCount:
        if (const auto* v = std::get_if<Value>(&arg); v && v->is_number()) {
          double k = v->as_number();
          ok = k >= 1 && std::floor(k) == k;
        }
        break;
      case SlotKind::kThreshold:
        if (std::holds_alternative<StepRef>(arg)) {
          ok = true;
        } else if (const auto* v = std::get_if<Value>(&arg)) {
          ok = v->is_number() || v->is_date();
        }
        break;
    }
    if (!ok) throw Error(describe(call, step) + ": argument " + std::to_string(i + 1) + " has the wrong kind");
    if (const auto* r = std::get_if<StepRef>(&arg); r && (r->step < 1 || r->step >= step)) {
      throw ReferenceError(step, r->step);
    }
  }
}

void validate_program(const Program& p) {
  if (p.calls.empty()) throw Error("empty program");
  for (std::size_t i = 0; i < p.calls.size(); ++i) validate_call(p.calls[i], static_cast<int>(i) + 1);
}

std::string pattern_signature(const std::vector<PrimitiveCall>& calls) {
  std::string out;
  for (const auto& c : calls) {
    if (!out.empty()) out += ' ';
    out += name(c.primitive);
  }
  return out;
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string render_arg(const Arg& a) {
  if (const auto* r = std::get_if<StepRef>(&a)) return "#" + std::to_string(r->step);
  if (const auto* c = std::get_if<Comparator>(&a)) return quote(to_string(*c));
  const auto& v = std::get<Value>(a);
  if (v.is_date()) return "date(" + format_date(v.as_date()) + ")";
  return format_number(v.as_number());
}

}  // namespace

std::string render_call(const PrimitiveCall& call) {
  std::string out{name(call.primitive)};
  out += '(';
  bool first = true;
  for (const auto& a : call.args) {
    if (!first) out += ", ";
    out += render_arg(a);
    first = false;
  }
  if (call.predicate) {
    if (!first) out += ", ";
    out += quote(call.predicate->text());
  }
  return out + ')';
}

std::string render_program(const std::vector<PrimitiveCall>& calls) {
  std::string out;
  for (const auto& c : calls) {
    if (!out.empty()) out += " ; ";
    out += render_call(c);
  }
  return out;
}

}  // namespace synthqa
