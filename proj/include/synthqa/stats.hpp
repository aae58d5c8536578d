#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace synthqa {

struct StatsReport {
  std::string kind;  // "dataset" or "corpus"
  std::uint64_t records = 0;
  std::map<std::string, std::uint64_t> pattern_histogram;
  std::map<int, std::uint64_t> step_histogram;
  std::map<int, std::uint64_t> cardinality_histogram;
  std::map<std::string, std::uint64_t> split_counts;
  // Corpus rows that did not parse or type, or dataset lines that failed the schema.
  std::map<std::string, std::uint64_t> parse_failures;
  // Corpus: admitted / rows. Dataset: read from the generation sidecar when present.
  std::optional<double> acceptance_rate;
  std::map<std::string, std::uint64_t> rejection_reasons;

  std::size_t num_patterns() const { return pattern_histogram.size(); }
  /// Share of records in the 10 most frequent patterns (0 when empty).
  double top10_share() const;
  std::string to_json() const;
  std::string to_text() const;
};

/// Streams a dataset JSONL file (".jsonl") or ingests a corpus table (anything
/// else). Dataset stats pick up "<path>.stats.json" when it exists. Throws IoError.
StatsReport run_stats(const std::string& path);

}  // namespace synthqa
