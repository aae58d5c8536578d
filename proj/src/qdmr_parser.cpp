#include "synthqa/qdmr_parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "synthqa/errors.hpp"

namespace synthqa {

namespace {
#include "synthqa_rules.inc"
}  // namespace

std::string_view to_string(Level l) { return l == Level::kLow ? "low" : "high"; }

std::optional<Level> parse_level(std::string_view text) {
  if (text == "low") return Level::kLow;
  if (text == "high") return Level::kHigh;
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// "#k" tokens in order of appearance.
std::vector<int> scan_refs(std::string_view s) {
  std::vector<int> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '#' || i + 1 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1]))) continue;
    int k = 0;
    std::size_t j = i + 1;
    for (; j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])); ++j) {
      k = std::min(k * 10 + (s[j] - '0'), 1'000'000);
    }
    out.push_back(k);
    i = j - 1;
  }
  return out;
}

std::optional<int> ref_token(std::string_view s) {
  s = trim(s);
  auto refs = scan_refs(s);
  if (refs.size() != 1 || s.front() != '#') return std::nullopt;
  for (char c : s.substr(1)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return refs.front();
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

}  // namespace

StepText::StepText(std::string text) : raw(std::move(text)), references(scan_refs(raw)) {
  std::sort(references.begin(), references.end());
  references.erase(std::unique(references.begin(), references.end()), references.end());
}

std::vector<StepText> split_steps(std::string_view qdmr) {
  std::vector<StepText> out;
  for (auto part : split(qdmr, ';')) out.emplace_back(normalize_step_text(trim(part)));
  // A trailing separator is not a step; an empty step elsewhere is a parse error.
  while (!out.empty() && out.back().raw.empty()) out.pop_back();
  return out;
}

Decomposition make_decomposition(std::string id, std::string question, std::string_view qdmr, Level level,
                                 std::string source) {
  return Decomposition{std::move(id), std::move(question), split_steps(qdmr), level, std::move(source)};
}

std::string normalize_step_text(std::string_view raw) {
  auto s = trim(raw);
  if (starts_with_icase(s, "return ")) s = trim(s.substr(7));
  else if (s.size() == 6 && starts_with_icase(s, "return")) s = {};
  while (!s.empty() && (s.back() == '?' || s.back() == '.' || s.back() == '!')) s = trim(s.substr(0, s.size() - 1));
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::optional<Comparator> comparator_from_phrase(std::string_view phrase) {
  std::string p;
  for (char c : trim(phrase)) p += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (p == "at least" || p == "no less than") return Comparator::kGe;
  if (p == "at most" || p == "no more than") return Comparator::kLe;
  if (p == "equal to" || p == "exactly" || p == "the same as" || p == "=") return Comparator::kEq;
  if (auto c = parse_comparator(p)) return c;
  static const char* const kGreater[] = {"higher", "more", "larger", "greater", "bigger", "longer",
                                          "later", "over", "above", "after"};
  static const char* const kLess[] = {"lower", "less", "fewer", "smaller", "shorter",
                                       "earlier", "below", "under", "before"};
  std::string_view head = p;
  if (head.ends_with(" than")) head.remove_suffix(5);
  for (auto w : kGreater) {
    if (head == w) return Comparator::kGt;
  }
  for (auto w : kLess) {
    if (head == w) return Comparator::kLt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rule table

RuleTable RuleTable::from_text(std::string_view text) {
  RuleTable table;
  std::map<std::string, std::string> macros;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto fields = split(line, '\t');
    auto where = [&] { return "rule table line " + std::to_string(line_no); };
    if (fields[0] == "define") {
      if (fields.size() != 3) throw SchemaError(where() + ": define needs a name and a regex");
      macros["%" + std::string(fields[1]) + "%"] = std::string(fields[2]);
      continue;
    }
    if (fields.size() != 4) throw SchemaError(where() + ": expected 4 tab-separated fields");
    ParseRule rule;
    rule.line = line_no;
    try {
      rule.priority = std::stoi(std::string(fields[0]));
    } catch (const std::exception&) {
      throw SchemaError(where() + ": bad priority");
    }
    std::string pattern(fields[1]);
    for (const auto& [name, body] : macros) {
      for (std::size_t pos; (pos = pattern.find(name)) != std::string::npos;) pattern.replace(pos, name.size(), body);
    }
    rule.pattern = pattern;
    auto prim = parse_primitive(trim(fields[2]));
    if (!prim) throw SchemaError(where() + ": unknown primitive '" + std::string(fields[2]) + "'");
    rule.target = *prim;
    for (auto item : split(trim(fields[3]), ' ')) {
      if (item.empty()) continue;
      if (item == "allrefs") {
        rule.extractors.push_back({Extractor::Kind::kAllRefs, 0, {}});
        continue;
      }
      auto sep = item.find_first_of(":=");
      if (sep == std::string_view::npos) throw SchemaError(where() + ": bad extractor '" + std::string(item) + "'");
      auto key = item.substr(0, sep);
      auto val = std::string(item.substr(sep + 1));
      Extractor ex{Extractor::Kind::kRef, 0, {}};
      if (item[sep] == '=') {
        if (key == "cmp") ex.kind = Extractor::Kind::kComparatorLiteral;
        else if (key == "k") ex.kind = Extractor::Kind::kCountLiteral;
        else throw SchemaError(where() + ": bad literal extractor '" + std::string(item) + "'");
        ex.literal = val;
      } else {
        static const std::map<std::string_view, Extractor::Kind> kKinds = {
            {"ref", Extractor::Kind::kRef},           {"pred", Extractor::Kind::kPredicate},
            {"refpred", Extractor::Kind::kRefPredicate}, {"num", Extractor::Kind::kNumber},
            {"date", Extractor::Kind::kDate},         {"thr", Extractor::Kind::kThreshold},
            {"cmp", Extractor::Kind::kComparator},    {"k", Extractor::Kind::kCount}};
        auto it = kKinds.find(key);
        if (it == kKinds.end()) throw SchemaError(where() + ": bad extractor '" + std::string(item) + "'");
        ex.kind = it->second;
        try {
          ex.group = std::stoi(val);
        } catch (const std::exception&) {
          throw SchemaError(where() + ": bad group in '" + std::string(item) + "'");
        }
      }
      rule.extractors.push_back(std::move(ex));
    }
    try {
      rule.regex = std::regex(pattern, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw SchemaError(where() + ": bad regex: " + e.what());
    }
    for (const auto& ex : rule.extractors) {
      if (ex.group > static_cast<int>(rule.regex.mark_count())) {
        throw SchemaError(where() + ": extractor group out of range");
      }
    }
    table.rules_.push_back(std::move(rule));
  }
  std::stable_sort(table.rules_.begin(), table.rules_.end(),
                   [](const ParseRule& a, const ParseRule& b) { return a.priority > b.priority; });
  return table;
}

RuleTable RuleTable::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read rule table " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

const RuleTable& RuleTable::builtin() {
  static const RuleTable table = from_text(kBuiltinRules);
  return table;
}

namespace {

// Builds the call for one matched rule; nullopt when an extractor rejects its group.
std::optional<PrimitiveCall> extract(const ParseRule& rule, const std::string& step, const std::smatch& m,
                                     int step_index) {
  PrimitiveCall call;
  call.primitive = rule.target;
  call.step_index = step_index;
  for (const auto& ex : rule.extractors) {
    std::string g = ex.group > 0 && m[ex.group].matched ? m[ex.group].str() : std::string{};
    switch (ex.kind) {
      case Extractor::Kind::kRef: {
        auto r = ref_token(g);
        if (!r) return std::nullopt;
        call.args.emplace_back(StepRef{*r});
        break;
      }
      case Extractor::Kind::kPredicate: {
        auto t = trim(g);
        if (t.empty()) return std::nullopt;
        call.predicate = Predicate(std::string(t));
        break;
      }
      case Extractor::Kind::kRefPredicate: {
        auto r = ref_token(g);
        if (!r) return std::nullopt;
        auto pos = static_cast<std::size_t>(m.position(ex.group));
        std::string text = step.substr(0, pos) + std::string(kRefSlot) + step.substr(pos + g.size());
        call.predicate = Predicate(normalize_step_text(text));
        call.args.emplace_back(StepRef{*r});
        break;
      }
      case Extractor::Kind::kNumber: {
        auto n = parse_number(trim(g));
        if (!n) return std::nullopt;
        call.args.emplace_back(Value::number(*n));
        break;
      }
      case Extractor::Kind::kDate: {
        auto d = parse_date(trim(g));
        if (!d) return std::nullopt;
        call.args.emplace_back(Value::date(*d));
        break;
      }
      case Extractor::Kind::kThreshold: {
        if (auto r = ref_token(g)) {
          call.args.emplace_back(StepRef{*r});
        } else if (auto d = parse_date(trim(g)); d && d->has_month_day()) {
          call.args.emplace_back(Value::date(*d));
        } else if (auto n = parse_number(trim(g))) {
          call.args.emplace_back(Value::number(*n));
        } else {
          return std::nullopt;
        }
        break;
      }
      case Extractor::Kind::kComparator: {
        auto c = comparator_from_phrase(g);
        if (!c) return std::nullopt;
        call.args.emplace_back(*c);
        break;
      }
      case Extractor::Kind::kComparatorLiteral: {
        auto c = parse_comparator(ex.literal);
        if (!c) return std::nullopt;
        call.args.emplace_back(*c);
        break;
      }
      case Extractor::Kind::kCount:
      case Extractor::Kind::kCountLiteral: {
        std::string_view tok = ex.kind == Extractor::Kind::kCount ? std::string_view(g) : ex.literal;
        int k = ordinal_value(trim(tok));
        if (k == 0) {
          auto n = parse_number(trim(tok));
          if (!n || *n < 1 || *n != static_cast<int>(*n)) return std::nullopt;
          k = static_cast<int>(*n);
        }
        call.args.emplace_back(Value::number(k));
        break;
      }
      case Extractor::Kind::kAllRefs:
        for (int r : scan_refs(step)) call.args.emplace_back(StepRef{r});
        break;
    }
  }
  return call;
}

}  // namespace

std::optional<PrimitiveCall> RuleTable::apply(const std::string& step, int step_index, const ParseRule** fired) const {
  std::smatch m;
  for (const auto& rule : rules_) {
    if (!std::regex_match(step, m, rule.regex)) continue;
    auto call = extract(rule, step, m, step_index);
    if (!call) continue;
    if (call->primitive != PrimitiveId::kCopy) {
      // Reference ranges are checked by the caller; here only shape matters.
      try {
        PrimitiveCall probe = *call;
        for (auto& a : probe.args) {
          if (std::holds_alternative<StepRef>(a)) a = StepRef{1};
        }
        validate_call(probe, std::max(step_index, 2));
      } catch (const Error&) {
        continue;
      }
    }
    if (fired) *fired = &rule;
    return call;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

Program parse_decomposition(const Decomposition& d, const RuleTable& rules) {
  if (d.steps.empty()) throw ParseError(0, d.question_text, "empty decomposition");
  Program p;
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    int idx = static_cast<int>(i) + 1;
    const auto& st = d.steps[i];
    for (int r : st.references) {
      if (r < 1 || r >= idx) throw ReferenceError(idx, r);
    }
    auto text = normalize_step_text(st.raw);
    if (text.empty()) throw ParseError(idx, st.raw, "empty step");
    auto call = rules.apply(text, idx);
    if (!call) throw ParseError(idx, st.raw);
    p.calls.push_back(std::move(*call));
  }
  return p;
}

Program normalize(const Program& p) {
  const auto n = p.calls.size();
  if (n == 0) throw NormalizationError("empty program");
  // source[i]: the non-copy step that step i stands for (0-based).
  std::vector<std::size_t> source(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = p.calls[i];
    source[i] = i;
    if (c.primitive != PrimitiveId::kCopy) continue;
    auto refs = c.refs();
    if (refs.size() != 1 || refs[0] < 1 || static_cast<std::size_t>(refs[0]) > i) {
      throw NormalizationError("copy step " + std::to_string(i + 1) + " has no valid source");
    }
    source[i] = source[static_cast<std::size_t>(refs[0] - 1)];
  }
  std::vector<bool> live(n, false);
  live[source[n - 1]] = true;
  for (std::size_t i = n; i-- > 0;) {
    if (!live[i]) continue;
    for (int r : p.calls[i].refs()) {
      if (r < 1 || static_cast<std::size_t>(r) > i) throw NormalizationError("dangling reference #" + std::to_string(r));
      live[source[static_cast<std::size_t>(r - 1)]] = true;
    }
  }
  std::vector<int> renumber(n, 0);
  Program out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!live[i] || p.calls[i].primitive == PrimitiveId::kCopy) continue;
    auto c = p.calls[i];
    for (auto& a : c.args) {
      if (auto* r = std::get_if<StepRef>(&a)) r->step = renumber[source[static_cast<std::size_t>(r->step - 1)]];
    }
    out.calls.push_back(std::move(c));
    renumber[i] = static_cast<int>(out.calls.size());
    out.calls.back().step_index = renumber[i];
  }
  if (out.calls.empty()) throw NormalizationError("final step undefined after normalization");
  return out;
}

// ---------------------------------------------------------------------------
// Program text

namespace {

// Splits on sep outside double quotes and parentheses.
std::vector<std::string_view> split_top(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quoted) {
      if (c == '\\') ++i;
      else if (c == '"') quoted = false;
      continue;
    }
    if (c == '"') quoted = true;
    else if (c == '(') ++depth;
    else if (c == ')') --depth;
    else if (c == sep && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

std::optional<std::string> unquote(std::string_view s) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) ++i;
    else if (s[i] == '"') return std::nullopt;
    out += s[i];
  }
  return out;
}

}  // namespace

Program parse_program_text(std::string_view text) {
  Program p;
  auto parts = split_top(text, ';');
  for (std::size_t i = 0; i < parts.size(); ++i) {
    int idx = static_cast<int>(i) + 1;
    auto s = trim(parts[i]);
    auto open = s.find('(');
    if (open == std::string_view::npos || s.back() != ')') throw ParseError(idx, std::string(s), "malformed call");
    auto prim = parse_primitive(trim(s.substr(0, open)));
    if (!prim) throw ParseError(idx, std::string(s), "unknown primitive");
    PrimitiveCall call;
    call.primitive = *prim;
    call.step_index = idx;
    auto inner = trim(s.substr(open + 1, s.size() - open - 2));
    auto args = inner.empty() ? std::vector<std::string_view>{} : split_top(inner, ',');
    for (std::size_t a = 0; a < args.size(); ++a) {
      auto arg = trim(args[a]);
      if (arg.empty()) throw ParseError(idx, std::string(s), "empty argument");
      if (arg.front() == '#') {
        auto r = ref_token(arg);
        if (!r) throw ParseError(idx, std::string(s), "bad reference");
        call.args.emplace_back(StepRef{*r});
      } else if (arg.front() == '"') {
        auto q = unquote(arg);
        if (!q) throw ParseError(idx, std::string(s), "bad string literal");
        if (is_grounding(call.primitive) && a + 1 == args.size()) {
          call.predicate = Predicate(*q);
        } else if (auto c = parse_comparator(*q)) {
          call.args.emplace_back(*c);
        } else {
          throw ParseError(idx, std::string(s), "bad comparator");
        }
      } else if (arg.starts_with("date(") && arg.back() == ')') {
        auto d = parse_date(trim(arg.substr(5, arg.size() - 6)));
        if (!d) throw ParseError(idx, std::string(s), "bad date");
        call.args.emplace_back(Value::date(*d));
      } else if (auto n = parse_number(arg)) {
        call.args.emplace_back(Value::number(*n));
      } else {
        throw ParseError(idx, std::string(s), "bad argument");
      }
    }
    try {
      validate_call(call, idx);
    } catch (const ReferenceError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(idx, std::string(s), e.what());
    }
    p.calls.push_back(std::move(call));
  }
  return p;
}

}  // namespace synthqa
