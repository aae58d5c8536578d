#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthqa/perturb.hpp"
#include "synthqa/qdmr_parser.hpp"

namespace synthqa {

/// Column names of a BREAK-style table. level and source are optional columns.
struct ColumnMap {
  std::string question_id = "question_id";
  std::string question_text = "question_text";
  std::string decomposition = "decomposition";
  std::string split = "split";
  std::string level = "level";
  std::string source = "source";

  /// "field=column,field=column" overrides. Throws Error on an unknown field.
  static ColumnMap parse(std::string_view spec);
};

struct IngestOptions {
  std::optional<Level> level_filter;
  int min_steps = 2;
  int max_steps = 6;
  ColumnMap columns;
  char delimiter = 0;  // 0 = detect from the header
  const RuleTable* rules = nullptr;  // nullptr = built-in table
};

struct IngestStats {
  int rows = 0;
  int admitted = 0;
  int skipped_level = 0;
  int skipped_step_range = 0;
  int parse_failures = 0;
  int type_failures = 0;
  std::map<std::string, int> failure_kinds;

  friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

struct CorpusEntry {
  Decomposition decomposition;
  TypedProgram program;
  std::string pattern;
  std::string split;

  friend bool operator==(const CorpusEntry& a, const CorpusEntry& b) {
    return a.decomposition.question_id == b.decomposition.question_id &&
           a.decomposition.question_text == b.decomposition.question_text && a.program == b.program &&
           a.pattern == b.pattern && a.split == b.split;
  }
};

/// Entries grouped by reasoning pattern; patterns iterate in sorted order.
class PatternIndex {
 public:
  void add(CorpusEntry entry);

  const std::vector<CorpusEntry>& entries() const { return entries_; }
  const std::map<std::string, std::vector<std::size_t>>& patterns() const { return patterns_; }
  std::map<std::string, int> histogram() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const PatternIndex&, const PatternIndex&) = default;

 private:
  std::vector<CorpusEntry> entries_;
  std::map<std::string, std::vector<std::size_t>> patterns_;
};

/// RFC 4180 rows (quoted fields, doubled quotes, embedded newlines).
std::vector<std::vector<std::string>> read_delimited(std::string_view text, char delimiter);
/// Tab when the header line has more tabs than commas, else comma.
char detect_delimiter(std::string_view text);

/// Throws IoError when unreadable and SchemaError when a required column is missing.
PatternIndex ingest_corpus(const std::string& path, const IngestOptions& opts = {}, IngestStats* stats = nullptr);
PatternIndex ingest_corpus_text(std::string_view text, const IngestOptions& opts = {}, IngestStats* stats = nullptr);

/// Every grounding predicate of the corpus with its step type.
PredicatePool predicate_pool(const PatternIndex& index);

}  // namespace synthqa
