#include "synthqa/value.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "synthqa/errors.hpp"

namespace synthqa {

const char* to_string(ExecErrorKind kind) {
  switch (kind) {
    case ExecErrorKind::kMissingGrounding: return "MissingGrounding";
    case ExecErrorKind::kRuntimeTypeMismatch: return "RuntimeTypeMismatch";
    case ExecErrorKind::kDivisionByZero: return "DivisionByZero";
    case ExecErrorKind::kEmptyAggregation: return "EmptyAggregation";
    case ExecErrorKind::kOutOfRange: return "OutOfRange";
  }
  return "?";
}

std::string_view to_string(Base b) {
  switch (b) {
    case Base::kNumber: return "number";
    case Base::kDate: return "date";
    case Base::kEntity: return "named_entity";
    case Base::kBoolean: return "boolean";
  }
  return "?";
}

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::kScalar: return "scalar";
    case Structure::kList: return "list";
    case Structure::kDict: return "dictionary";
  }
  return "?";
}

std::optional<Base> parse_base(std::string_view text) {
  if (text == "number") return Base::kNumber;
  if (text == "date") return Base::kDate;
  if (text == "named_entity") return Base::kEntity;
  if (text == "boolean") return Base::kBoolean;
  return std::nullopt;
}

std::optional<Structure> parse_structure(std::string_view text) {
  if (text == "scalar") return Structure::kScalar;
  if (text == "list") return Structure::kList;
  if (text == "dictionary") return Structure::kDict;
  return std::nullopt;
}

std::string to_string(const ValueType& t) {
  std::string out{to_string(t.base)};
  out += '/';
  out += to_string(t.structure);
  if (t.structure == Structure::kDict) {
    out += ':';
    out += to_string(t.key);
  }
  return out;
}

std::optional<ValueType> parse_value_type(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto base = parse_base(text.substr(0, slash));
  auto rest = text.substr(slash + 1);
  std::optional<Base> key;
  if (auto colon = rest.find(':'); colon != std::string_view::npos) {
    key = parse_base(rest.substr(colon + 1));
    if (!key) return std::nullopt;
    rest = rest.substr(0, colon);
  }
  auto structure = parse_structure(rest);
  if (!base || !structure) return std::nullopt;
  if (*structure == Structure::kDict) {
    if (!key) return std::nullopt;
    return ValueType::dict(*key, *base);
  }
  if (key) return std::nullopt;
  return ValueType{*base, *structure, Base::kEntity};
}

namespace {

Date with_default_month_day(const Date& d) {
  if (d.has_month_day()) return d;
  return Date{d.year, 7, 1};
}

}  // namespace

std::strong_ordering compare(const Date& a, const Date& b) {
  if (a.has_month_day() == b.has_month_day()) {
    if (auto c = a.year <=> b.year; c != 0) return c;
    if (auto c = a.month <=> b.month; c != 0) return c;
    return a.day <=> b.day;
  }
  return compare(with_default_month_day(a), with_default_month_day(b));
}

long long to_days(const Date& d) {
  using namespace std::chrono;
  Date full = with_default_month_day(d);
  auto ymd = year{full.year} / month{static_cast<unsigned>(full.month)} /
             day{static_cast<unsigned>(full.day)};
  return sys_days{ymd}.time_since_epoch().count();
}

bool operator==(const Value& a, const Value& b) { return a.data == b.data; }

std::optional<Base> Value::scalar_base() const {
  if (is_number()) return Base::kNumber;
  if (is_date()) return Base::kDate;
  if (is_entity()) return Base::kEntity;
  if (is_boolean()) return Base::kBoolean;
  return std::nullopt;
}

std::strong_ordering compare_scalars(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) {
    double x = a.as_number(), y = b.as_number();
    if (x < y) return std::strong_ordering::less;
    if (x > y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  if (a.is_date() && b.is_date()) return compare(a.as_date(), b.as_date());
  if (a.is_entity() && b.is_entity()) return a.as_entity() <=> b.as_entity();
  if (a.is_boolean() && b.is_boolean()) return a.as_boolean() <=> b.as_boolean();
  throw ExecError(ExecErrorKind::kRuntimeTypeMismatch, 0, "incomparable values");
}

namespace {

bool has_at_most_two_decimals(double v) {
  double cents = v * 100.0;
  return std::fabs(cents - std::round(cents)) < 1e-6;
}

bool valid_month_day(int year, int month, int day) {
  using namespace std::chrono;
  if (month == 0 && day == 0) return true;
  if (month < 1 || month > 12 || day < 1) return false;
  auto ymd = std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(month)} /
             std::chrono::day{static_cast<unsigned>(day)};
  return ymd.ok();
}

}  // namespace

Value make_number(double v) {
  if (!(v >= kMinNumber && v <= kMaxNumber)) {
    throw std::invalid_argument("number out of range: " + std::to_string(v));
  }
  if (!has_at_most_two_decimals(v)) {
    throw std::invalid_argument("number has more than two fractional digits");
  }
  return Value::number(std::round(v * 100.0) / 100.0);
}

Value make_date(Date d) {
  if (d.year < kMinYear || d.year > kMaxYear) {
    throw std::invalid_argument("year out of range: " + std::to_string(d.year));
  }
  if (!valid_month_day(d.year, d.month, d.day)) {
    throw std::invalid_argument("invalid month/day");
  }
  return Value::date(d);
}

bool is_valid_entity_name(std::string_view name) {
  return name.size() == 3 &&
         std::all_of(name.begin(), name.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

Value make_entity(std::string_view name) {
  if (!is_valid_entity_name(name)) {
    throw std::invalid_argument("entity must be three uppercase letters: '" + std::string(name) + "'");
  }
  return Value::entity(std::string(name));
}

namespace {

std::string format_number_impl(double v, bool grouped) {
  long long cents = std::llround(v * 100.0);
  bool negative = cents < 0;
  unsigned long long mag = negative ? static_cast<unsigned long long>(-cents)
                                    : static_cast<unsigned long long>(cents);
  std::string whole = std::to_string(mag / 100);
  if (grouped) {
    std::string g;
    int count = 0;
    for (auto it = whole.rbegin(); it != whole.rend(); ++it) {
      if (count > 0 && count % 3 == 0) g.push_back(',');
      g.push_back(*it);
      ++count;
    }
    whole.assign(g.rbegin(), g.rend());
  }
  unsigned frac = static_cast<unsigned>(mag % 100);
  std::string out = negative ? "-" + whole : whole;
  if (frac != 0) {
    char buf[4];
    std::snprintf(buf, sizeof buf, "%02u", frac);
    std::string f = buf;
    if (f.back() == '0') f.pop_back();
    out += '.' + f;
  }
  return out;
}

constexpr std::array<std::string_view, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

}  // namespace

std::string format_number(double v) { return format_number_impl(v, false); }
std::string format_number_grouped(double v) { return format_number_impl(v, true); }

std::optional<double> parse_number(std::string_view text) {
  std::string cleaned;
  for (char c : text) {
    if (c != ',') cleaned.push_back(c);
  }
  if (cleaned.empty()) return std::nullopt;
  bool seen_digit = false, seen_dot = false;
  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    char c = cleaned[i];
    if (c == '-' && i == 0) continue;
    if (c == '.' && !seen_dot) {
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    seen_digit = true;
  }
  if (!seen_digit) return std::nullopt;
  return std::strtod(cleaned.c_str(), nullptr);
}

std::string_view month_name(int month) {
  if (month < 1 || month > 12) return {};
  return kMonths[static_cast<std::size_t>(month - 1)];
}

std::string format_date(const Date& d) {
  if (!d.has_month_day()) return std::to_string(d.year);
  return std::to_string(d.day) + " " + std::string(month_name(d.month)) + " " + std::to_string(d.year);
}

std::optional<Date> parse_date(std::string_view text) {
  auto all_digits = [](std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  if (all_digits(text) && text.size() <= 4) return Date{std::stoi(std::string(text)), 0, 0};
  auto first = text.find(' ');
  auto last = text.rfind(' ');
  if (first == std::string_view::npos || first == last) return std::nullopt;
  auto day = text.substr(0, first);
  auto month = text.substr(first + 1, last - first - 1);
  auto year = text.substr(last + 1);
  if (!all_digits(day) || !all_digits(year) || year.size() > 4 || day.size() > 2) return std::nullopt;
  for (int m = 1; m <= 12; ++m) {
    if (month == kMonths[static_cast<std::size_t>(m - 1)]) {
      Date d{std::stoi(std::string(year)), m, std::stoi(std::string(day))};
      if (!valid_month_day(d.year, d.month, d.day)) return std::nullopt;
      return d;
    }
  }
  return std::nullopt;
}

std::string to_string(const Value& v) {
  if (v.is_number()) return format_number(v.as_number());
  if (v.is_date()) return format_date(v.as_date());
  if (v.is_entity()) return v.as_entity();
  if (v.is_boolean()) return v.as_boolean() ? "yes" : "no";
  std::string out;
  if (v.is_list()) {
    out = "[";
    for (std::size_t i = 0; i < v.as_list().size(); ++i) {
      if (i) out += ", ";
      out += to_string(v.as_list()[i]);
    }
    return out + "]";
  }
  out = "{";
  for (std::size_t i = 0; i < v.as_dict().size(); ++i) {
    if (i) out += ", ";
    out += to_string(v.as_dict()[i].key) + ": " + to_string(v.as_dict()[i].value);
  }
  return out + "}";
}

std::vector<std::string> answer_strings(const Value& v) {
  std::vector<std::string> out;
  if (v.is_list()) {
    for (const auto& item : v.as_list()) out.push_back(to_string(item));
  } else if (v.is_dict()) {
    for (const auto& e : v.as_dict()) out.push_back(to_string(e.key) + ": " + to_string(e.value));
  } else {
    out.push_back(to_string(v));
  }
  return out;
}

std::size_t cardinality(const Value& v) {
  if (v.is_list()) return v.as_list().size();
  if (v.is_dict()) return v.as_dict().size();
  return 1;
}

std::optional<ValueType> runtime_type(const Value& v) {
  if (auto b = v.scalar_base()) return ValueType::scalar(*b);
  if (v.is_list()) {
    if (v.as_list().empty()) return std::nullopt;
    auto b = v.as_list().front().scalar_base();
    if (!b) return std::nullopt;
    return ValueType::list(*b);
  }
  if (v.as_dict().empty()) return std::nullopt;
  auto k = v.as_dict().front().key.scalar_base();
  auto b = v.as_dict().front().value.scalar_base();
  if (!k || !b) return std::nullopt;
  return ValueType::dict(*k, *b);
}

bool conforms(const Value& v, const ValueType& t) {
  switch (t.structure) {
    case Structure::kScalar:
      return v.scalar_base() == t.base;
    case Structure::kList:
      if (!v.is_list()) return false;
      return std::all_of(v.as_list().begin(), v.as_list().end(),
                         [&](const Value& x) { return x.scalar_base() == t.base; });
    case Structure::kDict:
      if (!v.is_dict()) return false;
      return std::all_of(v.as_dict().begin(), v.as_dict().end(), [&](const DictEntry& e) {
        return e.key.scalar_base() == t.key && e.value.scalar_base() == t.base;
      });
  }
  return false;
}

}  // namespace synthqa
