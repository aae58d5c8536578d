#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "synthqa/mentions.hpp"
#include "synthqa/registry.hpp"
#include "synthqa/value.hpp"

namespace synthqa {

/// Placeholder standing for the referenced step's entity inside a projection predicate.
inline constexpr std::string_view kRefSlot = "#REF";

/// Natural-language relation grounded by a step ("touchdowns by Edward",
/// "yard lines of #REF"). The grounded entity fills the implicit blank.
class Predicate {
 public:
  Predicate() = default;
  explicit Predicate(std::string text);

  const std::string& text() const { return text_; }
  const std::vector<Mention>& mentions() const { return mentions_; }
  bool empty() const { return text_.empty(); }

  friend bool operator==(const Predicate& a, const Predicate& b) { return a.text_ == b.text_; }

 private:
  std::string text_;
  std::vector<Mention> mentions_;
};

struct StepRef {
  int step = 0;  // 1-based
  friend bool operator==(const StepRef&, const StepRef&) = default;
};

/// Call argument: a step reference, a comparator, or a number/date literal.
using Arg = std::variant<StepRef, Comparator, Value>;

struct PrimitiveCall {
  PrimitiveId primitive = PrimitiveId::kSelect;
  std::optional<Predicate> predicate;
  std::vector<Arg> args;
  int step_index = 0;  // 1-based

  std::vector<int> refs() const;
  friend bool operator==(const PrimitiveCall&, const PrimitiveCall&) = default;
};

/// Untyped program: one call per step, references only to earlier steps.
struct Program {
  std::vector<PrimitiveCall> calls;

  std::size_t size() const { return calls.size(); }
  friend bool operator==(const Program&, const Program&) = default;
};

/// Program plus a resolved ValueType per step. The last step is the answer.
struct TypedProgram {
  std::vector<PrimitiveCall> calls;
  std::vector<ValueType> types;

  std::size_t size() const { return calls.size(); }
  const ValueType& answer_type() const { return types.back(); }
  Program untyped() const { return Program{calls}; }
  friend bool operator==(const TypedProgram&, const TypedProgram&) = default;
};

/// Checks arity, slot kinds, predicate presence and reference ranges of call
/// number `step` (1-based). Throws Error describing the first violation.
void validate_call(const PrimitiveCall& call, int step);
void validate_program(const Program& p);

/// Space-joined primitive names in step order; predicates are ignored.
std::string pattern_signature(const std::vector<PrimitiveCall>& calls);
inline std::string pattern_signature(const Program& p) { return pattern_signature(p.calls); }
inline std::string pattern_signature(const TypedProgram& p) { return pattern_signature(p.calls); }

/// Canonical text: calls joined by " ; ", e.g.
///   select("touchdowns by Edward") ; filter(#1, "from the 1st quarter") ; count(#2)
/// Grounding predicates are the last argument. parse_program_text() inverts it.
std::string render_call(const PrimitiveCall& call);
std::string render_program(const std::vector<PrimitiveCall>& calls);
inline std::string render_program(const Program& p) { return render_program(p.calls); }
inline std::string render_program(const TypedProgram& p) { return render_program(p.calls); }

}  // namespace synthqa
