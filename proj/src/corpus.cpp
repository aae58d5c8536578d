#include "synthqa/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "synthqa/errors.hpp"
#include "synthqa/type_inference.hpp"

namespace synthqa {

ColumnMap ColumnMap::parse(std::string_view spec) {
  ColumnMap m;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    auto end = spec.find(',', pos);
    if (end == std::string_view::npos) end = spec.size();
    auto item = spec.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error("column mapping needs field=column: " + std::string(item));
    auto field = item.substr(0, eq);
    std::string column(item.substr(eq + 1));
    if (field == "question_id") m.question_id = column;
    else if (field == "question_text") m.question_text = column;
    else if (field == "decomposition") m.decomposition = column;
    else if (field == "split") m.split = column;
    else if (field == "level") m.level = column;
    else if (field == "source") m.source = column;
    else throw Error("unknown column field: " + std::string(field));
  }
  return m;
}

void PatternIndex::add(CorpusEntry entry) {
  patterns_[entry.pattern].push_back(entries_.size());
  entries_.push_back(std::move(entry));
}

std::map<std::string, int> PatternIndex::histogram() const {
  std::map<std::string, int> h;
  for (const auto& [p, ids] : patterns_) h[p] = static_cast<int>(ids.size());
  return h;
}

std::vector<std::vector<std::string>> read_delimited(std::string_view text, char delimiter) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    bool blank = row.size() == 1 && row[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      any = true;
    } else if (c == delimiter) {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
    } else {
      field += c;
      any = true;
    }
  }
  if (any || !field.empty() || !row.empty()) end_row();
  return rows;
}

char detect_delimiter(std::string_view text) {
  auto line = text.substr(0, text.find('\n'));
  auto tabs = std::count(line.begin(), line.end(), '\t');
  auto commas = std::count(line.begin(), line.end(), ',');
  return tabs > commas ? '\t' : ',';
}

namespace {

std::string source_from_id(const std::string& id) {
  auto u = id.find('_');
  return u == std::string::npos ? std::string{} : id.substr(0, u);
}

}  // namespace

PatternIndex ingest_corpus_text(std::string_view text, const IngestOptions& opts, IngestStats* stats) {
  IngestStats local;
  IngestStats& st = stats ? *stats : local;
  st = IngestStats{};
  PatternIndex index;
  char delim = opts.delimiter ? opts.delimiter : detect_delimiter(text);
  auto rows = read_delimited(text, delim);
  if (rows.empty()) return index;
  const auto& header = rows[0];
  auto column = [&](const std::string& name, bool required) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    if (required) throw SchemaError("missing column '" + name + "'");
    return -1;
  };
  const auto& cm = opts.columns;
  int c_id = column(cm.question_id, true), c_q = column(cm.question_text, true),
      c_d = column(cm.decomposition, true), c_split = column(cm.split, false), c_level = column(cm.level, false),
      c_src = column(cm.source, false);
  const RuleTable& rules = opts.rules ? *opts.rules : RuleTable::builtin();
  auto cell = [](const std::vector<std::string>& r, int c) { return c >= 0 && c < static_cast<int>(r.size()) ? r[c] : std::string{}; };

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++st.rows;
    Level level = Level::kHigh;
    if (auto l = parse_level(cell(row, c_level))) level = *l;
    if (opts.level_filter && level != *opts.level_filter) {
      ++st.skipped_level;
      continue;
    }
    std::string id = cell(row, c_id);
    std::string src = cell(row, c_src);
    if (src.empty()) src = source_from_id(id);
    auto d = make_decomposition(id, cell(row, c_q), cell(row, c_d), level, src);
    int steps = static_cast<int>(d.steps.size());
    if (steps < opts.min_steps || steps > opts.max_steps) {
      ++st.skipped_step_range;
      continue;
    }
    Program p;
    try {
      p = normalize(parse_decomposition(d, rules));
    } catch (const ParseError&) {
      ++st.parse_failures;
      ++st.failure_kinds["no_rule"];
      continue;
    } catch (const ReferenceError&) {
      ++st.parse_failures;
      ++st.failure_kinds["bad_reference"];
      continue;
    } catch (const Error&) {
      ++st.parse_failures;
      ++st.failure_kinds["normalization"];
      continue;
    }
    int size = static_cast<int>(p.size());
    if (size < opts.min_steps || size > opts.max_steps) {
      ++st.skipped_step_range;
      continue;
    }
    TypedProgram tp;
    try {
      tp = infer_types(p, d.question_text);
    } catch (const Error&) {
      ++st.type_failures;
      ++st.failure_kinds["type_conflict"];
      continue;
    }
    ++st.admitted;
    std::string split = cell(row, c_split);
    index.add(CorpusEntry{std::move(d), tp, pattern_signature(tp), split.empty() ? "train" : split});
  }
  return index;
}

PatternIndex ingest_corpus(const std::string& path, const IngestOptions& opts, IngestStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ingest_corpus_text(ss.str(), opts, stats);
}

PredicatePool predicate_pool(const PatternIndex& index) {
  PredicatePool pool;
  for (const auto& e : index.entries()) {
    for (std::size_t i = 0; i < e.program.size(); ++i) {
      if (e.program.calls[i].predicate) pool.add(*e.program.calls[i].predicate, e.program.types[i], e.program.calls[i].primitive);
    }
  }
  return pool;
}

}  // namespace synthqa
