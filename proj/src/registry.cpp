#include "synthqa/registry.hpp"

#include <stdexcept>

namespace synthqa {

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::kGt: return ">";
    case Comparator::kLt: return "<";
    case Comparator::kGe: return ">=";
    case Comparator::kLe: return "<=";
    case Comparator::kEq: return "=";
  }
  return "?";
}

std::optional<Comparator> parse_comparator(std::string_view text) {
  if (text == ">") return Comparator::kGt;
  if (text == "<") return Comparator::kLt;
  if (text == ">=") return Comparator::kGe;
  if (text == "<=") return Comparator::kLe;
  if (text == "=") return Comparator::kEq;
  return std::nullopt;
}

bool apply_comparator(Comparator c, std::strong_ordering ord) {
  switch (c) {
    case Comparator::kGt: return ord > 0;
    case Comparator::kLt: return ord < 0;
    case Comparator::kGe: return ord >= 0;
    case Comparator::kLe: return ord <= 0;
    case Comparator::kEq: return ord == 0;
  }
  return false;
}

Comparator complement(Comparator c) {
  switch (c) {
    case Comparator::kGt: return Comparator::kLe;
    case Comparator::kLt: return Comparator::kGe;
    case Comparator::kGe: return Comparator::kLt;
    case Comparator::kLe: return Comparator::kGt;
    case Comparator::kEq: return Comparator::kEq;
  }
  return c;
}

namespace {

constexpr StructSet kScalar = bit(Structure::kScalar);
constexpr StructSet kList = bit(Structure::kList);
constexpr StructSet kDict = bit(Structure::kDict);
constexpr BaseSet kNum = bit(Base::kNumber);
constexpr BaseSet kDate = bit(Base::kDate);
constexpr BaseSet kBool = bit(Base::kBoolean);

SlotSchema ref(StructSet s, BaseSet b, char var = 0, char key = 0) {
  return SlotSchema{SlotKind::kRef, s, b, var, key, false};
}
SlotSchema comparator() { return SlotSchema{SlotKind::kComparator, 0, 0, 0, 0, false}; }
SlotSchema count_k() { return SlotSchema{SlotKind::kCount, 0, 0, 0, 0, false}; }
SlotSchema threshold(char var) {
  return SlotSchema{SlotKind::kThreshold, kScalar, kOrderedBases, var, 0, false};
}
OutputSchema out(StructSet s, BaseSet b, char var = 0, char key = 0) {
  return OutputSchema{OutputRule::kFixed, s, b, var, key};
}

std::vector<PrimitiveSignature> build_registry() {
  using P = PrimitiveId;
  std::vector<PrimitiveSignature> r;
  auto add = [&](P id, std::string_view name, std::string_view family, bool grounding,
                 std::vector<SlotSchema> in, OutputSchema o) {
    r.push_back(PrimitiveSignature{id, name, family, grounding, std::move(in), o});
  };
  const auto list_a = ref(kList, kGroundableBases, 'a');
  const auto list_k = ref(kList, kGroundableBases, 'k');
  const auto ordered_dict = ref(kDict, kOrderedBases, 'a', 'k');
  const auto num = ref(kScalar, kNum);
  const auto date = ref(kScalar, kDate);
  const auto boolean = ref(kScalar, kBool);

  add(P::kSelect, "select", "grounding", true, {},
      out(kScalar | kList | kDict, kGroundableBases, 'b', 'k'));
  add(P::kProject, "project", "grounding", true,
      {ref(kScalar | kList, kGroundableBases, 'k')},
      OutputSchema{OutputRule::kProject, kScalar | kDict, kGroundableBases, 'b', 'k'});
  add(P::kFilter, "filter", "grounding", true, {list_a}, out(kList, kGroundableBases, 'a'));
  {
    auto in = ref(kScalar | kList, kGroundableBases);
    in.optional = true;
    add(P::kBoolean, "boolean", "grounding", true, {in}, out(kScalar, kBool));
  }

  add(P::kCount, "count", "counting", false, {ref(kList | kDict, kGroundableBases)}, out(kScalar, kNum));
  add(P::kGroupedCount, "grouped_count", "counting", false,
      {list_k, ref(kDict, kGroundableBases, 'a', 'k')}, out(kDict, kNum, 0, 'a'));

  const auto nums = ref(kList | kDict, kNum);
  add(P::kListSum, "list_sum", "aggregation", false, {nums}, out(kScalar, kNum));
  add(P::kListAverage, "list_average", "aggregation", false, {nums}, out(kScalar, kNum));
  add(P::kListMedian, "list_median", "aggregation", false, {nums}, out(kScalar, kNum));
  add(P::kListMax, "list_max", "aggregation", false, {ref(kList | kDict, kOrderedBases, 'a')},
      out(kScalar, kOrderedBases, 'a'));
  add(P::kListMin, "list_min", "aggregation", false, {ref(kList | kDict, kOrderedBases, 'a')},
      out(kScalar, kOrderedBases, 'a'));

  add(P::kArithmeticSum, "arithmetic_sum", "arithmetic", false, {num, num}, out(kScalar, kNum));
  add(P::kArithmeticDifference, "arithmetic_difference", "arithmetic", false, {num, num}, out(kScalar, kNum));
  add(P::kArithmeticAbsoluteDifference, "arithmetic_absolute_difference", "arithmetic", false, {num, num},
      out(kScalar, kNum));
  add(P::kArithmeticMultiplication, "arithmetic_multiplication", "arithmetic", false, {num, num},
      out(kScalar, kNum));
  add(P::kArithmeticDivision, "arithmetic_division", "arithmetic", false, {num, num}, out(kScalar, kNum));
  add(P::kArithmeticPercentage, "arithmetic_percentage", "arithmetic", false, {num, num}, out(kScalar, kNum));

  add(P::kFilterCompared, "filter_a_where_b_is_compared_to", "comparative", false,
      {ordered_dict, comparator(), threshold('a')}, out(kList, kGroundableBases, 'k'));

  add(P::kArgmax, "argmax", "superlative", false, {list_k, ordered_dict}, out(kList, kGroundableBases, 'k'));
  add(P::kArgmin, "argmin", "superlative", false, {list_k, ordered_dict}, out(kList, kGroundableBases, 'k'));
  add(P::kKthHighest, "kth_highest", "superlative", false, {list_k, ordered_dict, count_k()},
      out(kList, kGroundableBases, 'k'));
  add(P::kKthLowest, "kth_lowest", "superlative", false, {list_k, ordered_dict, count_k()},
      out(kList, kGroundableBases, 'k'));
  add(P::kTopKHighest, "top_k_highest", "superlative", false, {list_k, ordered_dict, count_k()},
      out(kList, kGroundableBases, 'k'));
  add(P::kTopKLowest, "top_k_lowest", "superlative", false, {list_k, ordered_dict, count_k()},
      out(kList, kGroundableBases, 'k'));

  add(P::kUnion, "union", "set", false, {list_a, list_a}, out(kList, kGroundableBases, 'a'));
  add(P::kIntersection, "intersection", "set", false, {list_a, list_a}, out(kList, kGroundableBases, 'a'));
  add(P::kDiscard, "discard", "set", false, {list_a, list_a}, out(kList, kGroundableBases, 'a'));

  add(P::kSortAscending, "sort_ascending", "sort", false, {ref(kList, kOrderedBases, 'a')},
      out(kList, kOrderedBases, 'a'));
  add(P::kSortDescending, "sort_descending", "sort", false, {ref(kList, kOrderedBases, 'a')},
      out(kList, kOrderedBases, 'a'));
  add(P::kSortKeysByValueAscending, "sort_keys_by_value_ascending", "sort", false, {list_k, ordered_dict},
      out(kList, kGroundableBases, 'k'));
  add(P::kSortKeysByValueDescending, "sort_keys_by_value_descending", "sort", false, {list_k, ordered_dict},
      out(kList, kGroundableBases, 'k'));

  add(P::kDateDifferenceInYears, "date_difference_in_years", "date", false, {date, date}, out(kScalar, kNum));
  add(P::kDateDifferenceInMonths, "date_difference_in_months", "date", false, {date, date}, out(kScalar, kNum));
  add(P::kDateDifferenceInDays, "date_difference_in_days", "date", false, {date, date}, out(kScalar, kNum));
  add(P::kExtractYear, "extract_year", "date", false, {date}, out(kScalar, kNum));

  add(P::kLogicalAnd, "logical_and", "boolean", false, {boolean, boolean}, out(kScalar, kBool));
  add(P::kLogicalOr, "logical_or", "boolean", false, {boolean, boolean}, out(kScalar, kBool));
  add(P::kLogicalNot, "logical_not", "boolean", false, {boolean}, out(kScalar, kBool));
  add(P::kBooleanComparison, "boolean_comparison", "boolean", false,
      {ref(kScalar, kOrderedBases, 'a'), comparator(), threshold('a')}, out(kScalar, kBool));
  add(P::kExists, "exists", "boolean", false, {ref(kList | kDict, kGroundableBases)}, out(kScalar, kBool));
  add(P::kIsEmpty, "is_empty", "boolean", false, {ref(kList | kDict, kGroundableBases)}, out(kScalar, kBool));

  add(P::kTakeKth, "take_kth", "selection", false, {list_a, count_k()}, out(kScalar, kGroundableBases, 'a'));
  add(P::kSelectLarger, "select_larger", "selection", false,
      {ref(kScalar, kOrderedBases, 'a'), ref(kScalar, kOrderedBases, 'a')}, out(kScalar, kOrderedBases, 'a'));
  add(P::kSelectSmaller, "select_smaller", "selection", false,
      {ref(kScalar, kOrderedBases, 'a'), ref(kScalar, kOrderedBases, 'a')}, out(kScalar, kOrderedBases, 'a'));

  add(P::kDictKeys, "dict_keys", "dictionary", false, {ref(kDict, kGroundableBases, 'a', 'k')},
      out(kList, kGroundableBases, 'k'));
  add(P::kDictValues, "dict_values", "dictionary", false, {ref(kDict, kGroundableBases, 'a', 'k')},
      out(kList, kGroundableBases, 'a'));

  for (std::size_t i = 0; i < r.size(); ++i) {
    if (static_cast<std::size_t>(r[i].primitive) != i) throw std::logic_error("registry order");
  }
  return r;
}

const PrimitiveSignature kCopySignature{
    PrimitiveId::kCopy, "copy", "identity", false,
    {ref(kAllStructures, kAllBases, 'a', 'k')},
    OutputSchema{OutputRule::kSameAsSlot0, kAllStructures, kAllBases, 'a', 'k'}};

}  // namespace

std::span<const PrimitiveSignature> registry() {
  static const std::vector<PrimitiveSignature> table = build_registry();
  return table;
}

const PrimitiveSignature& signature(PrimitiveId id) {
  if (id == PrimitiveId::kCopy) return kCopySignature;
  return registry()[static_cast<std::size_t>(id)];
}

std::string_view name(PrimitiveId id) { return signature(id).name; }

std::optional<PrimitiveId> parse_primitive(std::string_view text) {
  for (const auto& sig : registry()) {
    if (sig.name == text) return sig.primitive;
  }
  if (text == "copy") return PrimitiveId::kCopy;
  return std::nullopt;
}

bool is_grounding(PrimitiveId id) { return id != PrimitiveId::kCopy && signature(id).needs_grounding; }

}  // namespace synthqa
