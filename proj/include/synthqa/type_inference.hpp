#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthqa/program.hpp"

namespace synthqa {

/// Where a typing decision came from. Higher origins win only where lower ones
/// leave a choice; a keyword hint that contradicts a signature is a TypeConflict.
enum class TypeOrigin : std::uint8_t { kSignature, kKeyword, kDefault };

std::string_view to_string(TypeOrigin o);

/// One narrowing applied during inference, kept for diagnostics.
struct TypeConstraint {
  enum class Relation : std::uint8_t { kEquals, kElementOf, kKeyOf, kValueOf, kBaseIs, kStructureIs };
  int step = 0;
  Relation relation = Relation::kBaseIs;
  std::string operand;  // rendered type set or "#k"
  TypeOrigin origin = TypeOrigin::kSignature;
};

struct TypeHint {
  std::optional<Base> base;
  TypeOrigin base_origin = TypeOrigin::kDefault;
  std::optional<Structure> structure;
  TypeOrigin structure_origin = TypeOrigin::kDefault;

  friend bool operator==(const TypeHint&, const TypeHint&) = default;
};

/// Lexical cues: "number of"/"how many"/unit nouns -> number, "when"/"date"/
/// "year" -> date (both scalar when the phrase asks for a single quantity),
/// plural head noun -> list, singular -> scalar. ref_structure is the
/// structure of the referenced step for projection predicates; a per-element
/// predicate then inherits it.
std::optional<TypeHint> keyword_type_hint(const Predicate& predicate,
                                          std::optional<Structure> ref_structure = std::nullopt);

/// Last word of the leading noun chunk ("touchdowns by Edward" -> "touchdowns").
std::string head_noun(std::string_view text);
bool is_plural_noun(std::string_view word);

struct TypingTrace {
  std::vector<TypeConstraint> constraints;
  int iterations = 0;
};

/// Types every step of a normalized program. Throws TypeConflict.
/// Integer literals that are plausible years become dates where the slot needs one.
TypedProgram infer_types(const Program& p, std::string_view question = {}, TypingTrace* trace = nullptr);

/// "step<TAB>primitive<TAB>base/structure" per line.
std::string type_dump(const TypedProgram& tp);

}  // namespace synthqa
