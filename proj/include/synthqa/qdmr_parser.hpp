#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "synthqa/program.hpp"

namespace synthqa {

enum class Level : std::uint8_t { kLow, kHigh };

std::string_view to_string(Level l);
std::optional<Level> parse_level(std::string_view text);

/// One QDMR step with its "#k" back-references (sorted, unique).
struct StepText {
  std::string raw;
  std::vector<int> references;

  explicit StepText(std::string text);
  StepText() = default;
  friend bool operator==(const StepText&, const StepText&) = default;
};

struct Decomposition {
  std::string question_id;
  std::string question_text;
  std::vector<StepText> steps;
  Level level = Level::kHigh;
  std::string source_dataset;
};

/// Splits a BREAK-style "return a ;return #1 b" string into steps.
std::vector<StepText> split_steps(std::string_view qdmr);
Decomposition make_decomposition(std::string id, std::string question, std::string_view qdmr,
                                 Level level = Level::kHigh, std::string source = {});

/// How one regex group becomes part of the call.
struct Extractor {
  enum class Kind : std::uint8_t {
    kRef,        // "#k" -> StepRef
    kPredicate,  // group text -> predicate
    kRefPredicate,  // whole step with the group's "#k" replaced by #REF -> predicate
    kNumber,
    kDate,
    kThreshold,  // "#k", number or date
    kComparator, // comparator phrase ("more than", "at least") -> Comparator
    kComparatorLiteral,
    kCount,      // ordinal/number word -> k
    kCountLiteral,
    kAllRefs,    // every "#k" in the step, in order
  };
  Kind kind;
  int group = 0;
  std::string literal;
};

struct ParseRule {
  int priority = 0;
  std::string pattern;
  PrimitiveId target = PrimitiveId::kSelect;
  std::vector<Extractor> extractors;
  int line = 0;
  std::regex regex;
};

/// Ordered rule list; the highest-priority matching rule wins, file order breaks ties.
class RuleTable {
 public:
  /// Lines: "priority<TAB>regex<TAB>primitive<TAB>extractors"; '#' starts a comment.
  static RuleTable from_text(std::string_view text);
  static RuleTable from_file(const std::string& path);
  /// The table compiled into the library.
  static const RuleTable& builtin();

  const std::vector<ParseRule>& rules() const { return rules_; }
  /// Call built by the highest-priority rule that matches the (normalized)
  /// step and whose extractors succeed; nullopt when none does.
  std::optional<PrimitiveCall> apply(const std::string& step, int step_index,
                                     const ParseRule** fired = nullptr) const;

 private:
  std::vector<ParseRule> rules_;
};

/// Lowercases nothing; trims, strips a leading "return ", collapses spaces and
/// drops trailing punctuation.
std::string normalize_step_text(std::string_view raw);

/// Maps a comparator phrase ("more than", "at least", "before") to a Comparator.
std::optional<Comparator> comparator_from_phrase(std::string_view phrase);

/// One call per step, before normalization. Throws ParseError / ReferenceError.
Program parse_decomposition(const Decomposition& d, const RuleTable& rules = RuleTable::builtin());

/// Removes copy steps, drops steps unreachable from the last one and renumbers.
Program normalize(const Program& p);

/// Inverse of render_program(). Throws ParseError on malformed text.
Program parse_program_text(std::string_view text);

}  // namespace synthqa
