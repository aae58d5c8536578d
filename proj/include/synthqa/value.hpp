#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace synthqa {

// Ranges for synthetic groundings.
inline constexpr double kMinNumber = 0.0;
inline constexpr double kMaxNumber = 1'000'000.0;
inline constexpr int kMinYear = 1100;
inline constexpr int kMaxYear = 2022;

enum class Base : std::uint8_t { kNumber, kDate, kEntity, kBoolean };
enum class Structure : std::uint8_t { kScalar, kList, kDict };

std::string_view to_string(Base b);
std::string_view to_string(Structure s);
std::optional<Base> parse_base(std::string_view text);
std::optional<Structure> parse_structure(std::string_view text);

/// Resolved type of a program step. For dictionaries, base is the value base and
/// key the key base; key is ignored otherwise.
struct ValueType {
  Base base = Base::kEntity;
  Structure structure = Structure::kList;
  Base key = Base::kEntity;

  static ValueType scalar(Base b) { return {b, Structure::kScalar, Base::kEntity}; }
  static ValueType list(Base b) { return {b, Structure::kList, Base::kEntity}; }
  static ValueType dict(Base key, Base value) { return {value, Structure::kDict, key}; }

  friend bool operator==(const ValueType& a, const ValueType& b) {
    if (a.base != b.base || a.structure != b.structure) return false;
    return a.structure != Structure::kDict || a.key == b.key;
  }
};

/// "base/structure", with ":key" appended for dictionaries.
std::string to_string(const ValueType& t);
std::optional<ValueType> parse_value_type(std::string_view text);

/// Calendar date; month and day are 0 when only the year is known.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  bool has_month_day() const { return month != 0; }
  friend bool operator==(const Date&, const Date&) = default;
};

/// Lexicographic (year, month, day). When exactly one side is year-only, the
/// missing month/day default to July 1.
std::strong_ordering compare(const Date& a, const Date& b);

/// Days since 1970-01-01 (year-only dates resolve to July 1).
long long to_days(const Date& d);

struct Entity {
  std::string name;
  friend bool operator==(const Entity&, const Entity&) = default;
  friend auto operator<=>(const Entity&, const Entity&) = default;
};

struct Value;
struct DictEntry;
using List = std::vector<Value>;
using Dict = std::vector<DictEntry>;

/// Tagged union over the runtime values a program can produce. Construction is
/// unchecked; use the make_* factories for generated groundings.
struct Value {
  std::variant<double, Date, Entity, bool, List, Dict> data;

  static Value number(double v) { return Value{v}; }
  static Value date(Date d) { return Value{d}; }
  static Value entity(std::string name) { return Value{Entity{std::move(name)}}; }
  static Value boolean(bool b) { return Value{b}; }
  static Value list(List items);
  static Value dict(Dict entries);

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_date() const { return std::holds_alternative<Date>(data); }
  bool is_entity() const { return std::holds_alternative<Entity>(data); }
  bool is_boolean() const { return std::holds_alternative<bool>(data); }
  bool is_list() const { return std::holds_alternative<List>(data); }
  bool is_dict() const { return std::holds_alternative<Dict>(data); }
  bool is_scalar() const { return !is_list() && !is_dict(); }

  double as_number() const { return std::get<double>(data); }
  const Date& as_date() const { return std::get<Date>(data); }
  const std::string& as_entity() const { return std::get<Entity>(data).name; }
  bool as_boolean() const { return std::get<bool>(data); }
  const List& as_list() const { return std::get<List>(data); }
  const Dict& as_dict() const { return std::get<Dict>(data); }

  std::optional<Base> scalar_base() const;

  friend bool operator==(const Value& a, const Value& b);
};

struct DictEntry {
  Value key;
  Value value;
  friend bool operator==(const DictEntry&, const DictEntry&) = default;
};

inline Value Value::list(List items) { return Value{std::move(items)}; }
inline Value Value::dict(Dict entries) { return Value{std::move(entries)}; }

/// Ordering for two scalars of the same base (numbers, dates, entities).
std::strong_ordering compare_scalars(const Value& a, const Value& b);

/// Checked factories: reject numbers outside [0, 1e6] or with more than two
/// fractional digits, years outside [1100, 2022], and entities not matching [A-Z]{3}.
Value make_number(double v);
Value make_date(Date d);
Value make_entity(std::string_view name);
bool is_valid_entity_name(std::string_view name);

/// Plain digits, at most two fractional digits, no thousand separators.
std::string format_number(double v);
/// Same with comma thousand separators (surface form only).
std::string format_number_grouped(double v);
/// Accepts optional comma thousand separators.
std::optional<double> parse_number(std::string_view text);

/// "D Month YYYY" when month/day are present, else "YYYY".
std::string format_date(const Date& d);
std::optional<Date> parse_date(std::string_view text);
std::string_view month_name(int month);

/// Human-readable form used in traces and contexts.
std::string to_string(const Value& v);

/// Answer strings: one per element for lists, "key: value" per dictionary entry.
std::vector<std::string> answer_strings(const Value& v);

/// Lists and dictionaries count their elements; scalars count as one.
std::size_t cardinality(const Value& v);

/// Runtime type; nullopt for an empty list or dictionary (element base unknown).
std::optional<ValueType> runtime_type(const Value& v);

/// True when v conforms to t. Empty collections conform to any element base.
bool conforms(const Value& v, const ValueType& t);

}  // namespace synthqa
