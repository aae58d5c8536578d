#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "synthqa/value.hpp"

namespace synthqa {

enum class PrimitiveId : std::uint8_t {
  // grounding
  kSelect,
  kProject,
  kFilter,
  kBoolean,
  // counting
  kCount,
  kGroupedCount,
  // aggregation over lists (or dictionary values)
  kListSum,
  kListAverage,
  kListMedian,
  kListMax,
  kListMin,
  // scalar arithmetic
  kArithmeticSum,
  kArithmeticDifference,
  kArithmeticAbsoluteDifference,
  kArithmeticMultiplication,
  kArithmeticDivision,
  kArithmeticPercentage,
  // comparative
  kFilterCompared,
  // superlatives
  kArgmax,
  kArgmin,
  kKthHighest,
  kKthLowest,
  kTopKHighest,
  kTopKLowest,
  // sets
  kUnion,
  kIntersection,
  kDiscard,
  // sorting
  kSortAscending,
  kSortDescending,
  kSortKeysByValueAscending,
  kSortKeysByValueDescending,
  // dates
  kDateDifferenceInYears,
  kDateDifferenceInMonths,
  kDateDifferenceInDays,
  kExtractYear,
  // boolean logic
  kLogicalAnd,
  kLogicalOr,
  kLogicalNot,
  kBooleanComparison,
  kExists,
  kIsEmpty,
  // selection
  kTakeKth,
  kSelectLarger,
  kSelectSmaller,
  // dictionaries
  kDictKeys,
  kDictValues,
  // Parse-only identity step; removed by normalize() and never executed.
  kCopy,
};

inline constexpr std::size_t kRegisteredPrimitiveCount = static_cast<std::size_t>(PrimitiveId::kCopy);

enum class Comparator : std::uint8_t { kGt, kLt, kGe, kLe, kEq };

std::string_view to_string(Comparator c);
std::optional<Comparator> parse_comparator(std::string_view text);
/// a <c> b over ordered scalars.
bool apply_comparator(Comparator c, std::strong_ordering ord);
/// The comparator whose result is the complement of c (">" vs "<=").
Comparator complement(Comparator c);

// Bit sets over Base / Structure.
using BaseSet = std::uint8_t;
using StructSet = std::uint8_t;
constexpr BaseSet bit(Base b) { return static_cast<BaseSet>(1u << static_cast<unsigned>(b)); }
constexpr StructSet bit(Structure s) { return static_cast<StructSet>(1u << static_cast<unsigned>(s)); }
inline constexpr BaseSet kGroundableBases = bit(Base::kNumber) | bit(Base::kDate) | bit(Base::kEntity);
inline constexpr BaseSet kOrderedBases = bit(Base::kNumber) | bit(Base::kDate);
inline constexpr BaseSet kAllBases = kGroundableBases | bit(Base::kBoolean);
inline constexpr StructSet kAllStructures =
    bit(Structure::kScalar) | bit(Structure::kList) | bit(Structure::kDict);

enum class SlotKind : std::uint8_t {
  kRef,         // step reference
  kComparator,  // comparator literal
  kCount,       // positive integer literal (k)
  kThreshold,   // scalar step reference or number/date literal
};

/// One input position. Type variables are single letters shared across the
/// slots and output of a call; 0 means unconstrained beyond the set.
struct SlotSchema {
  SlotKind kind = SlotKind::kRef;
  StructSet structures = 0;
  BaseSet bases = 0;
  char base_var = 0;
  char key_var = 0;
  bool optional = false;
};

enum class OutputRule : std::uint8_t {
  kFixed,       // structure from the schema set
  kSameAsSlot0, // structure of input 0
  kProject,     // list input -> dictionary keyed by input, scalar -> scalar
};

struct OutputSchema {
  OutputRule rule = OutputRule::kFixed;
  StructSet structures = 0;
  BaseSet bases = 0;
  char base_var = 0;
  char key_var = 0;
};

struct PrimitiveSignature {
  PrimitiveId primitive;
  std::string_view name;
  std::string_view family;
  bool needs_grounding = false;
  std::vector<SlotSchema> inputs;
  OutputSchema output;
};

/// Closed, enumerable registry (kCopy excluded).
std::span<const PrimitiveSignature> registry();
const PrimitiveSignature& signature(PrimitiveId id);
std::string_view name(PrimitiveId id);
std::optional<PrimitiveId> parse_primitive(std::string_view name);
bool is_grounding(PrimitiveId id);

}  // namespace synthqa
