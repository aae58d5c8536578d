#include "synthqa/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "synthqa/corpus.hpp"
#include "synthqa/errors.hpp"
#include "synthqa/jsonl.hpp"

namespace synthqa {

double StatsReport::top10_share() const {
  if (records == 0) return 0.0;
  std::vector<std::uint64_t> counts;
  for (const auto& [p, c] : pattern_histogram) counts.push_back(c);
  std::sort(counts.rbegin(), counts.rend());
  std::uint64_t top = 0;
  for (std::size_t i = 0; i < counts.size() && i < 10; ++i) top += counts[i];
  return static_cast<double>(top) / static_cast<double>(records);
}

std::string StatsReport::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["records"] = records;
  j["num_patterns"] = num_patterns();
  j["top10_share"] = top10_share();
  j["acceptance_rate"] = acceptance_rate ? nlohmann::ordered_json(*acceptance_rate) : nlohmann::ordered_json();
  j["pattern_histogram"] = pattern_histogram;
  auto int_keys = [](const std::map<int, std::uint64_t>& m) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m) o[std::to_string(k)] = v;
    return o;
  };
  j["step_histogram"] = int_keys(step_histogram);
  j["cardinality_histogram"] = int_keys(cardinality_histogram);
  j["split_counts"] = split_counts;
  j["parse_failures"] = parse_failures;
  j["rejection_reasons"] = rejection_reasons;
  return j.dump(2);
}

std::string StatsReport::to_text() const {
  std::ostringstream out;
  char buf[64];
  out << kind << ": " << records << " records, " << num_patterns() << " patterns\n";
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * top10_share());
  out << "top-10 pattern share: " << buf << "\n";
  if (acceptance_rate) {
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * *acceptance_rate);
    out << "acceptance rate: " << buf << "\n";
  }
  out << "steps:";
  for (const auto& [k, v] : step_histogram) out << " " << k << "=" << v;
  out << "\n";
  if (!cardinality_histogram.empty()) {
    out << "answer cardinality:";
    for (const auto& [k, v] : cardinality_histogram) out << " " << k << "=" << v;
    out << "\n";
  }
  for (const auto& [name, m] : {std::pair{"parse failures", &parse_failures},
                                std::pair{"rejections", &rejection_reasons}}) {
    if (m->empty()) continue;
    out << name << ":";
    for (const auto& [k, v] : *m) out << " " << k << "=" << v;
    out << "\n";
  }
  std::vector<std::pair<std::string, std::uint64_t>> ranked(pattern_histogram.begin(), pattern_histogram.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > 10) ranked.resize(10);
  for (const auto& [p, c] : ranked) out << "  " << c << "\t" << p << "\n";
  return out.str();
}

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

StatsReport dataset_stats(const std::string& path) {
  StatsReport r;
  r.kind = "dataset";
  JsonlReader reader(path);
  std::string line;
  while (reader.next(line)) {
    QAInstance inst;
    try {
      inst = instance_from_json(line);
    } catch (const Error&) {
      ++r.parse_failures["schema"];
      continue;
    }
    ++r.records;
    ++r.pattern_histogram[inst.pattern];
    ++r.step_histogram[static_cast<int>(inst.program.size())];
    ++r.cardinality_histogram[inst.cardinality];
    ++r.split_counts[inst.split];
  }
  std::ifstream side(path + ".stats.json");
  if (side) {
    try {
      auto j = nlohmann::json::parse(side);
      if (j.contains("acceptance_rate")) r.acceptance_rate = j["acceptance_rate"].get<double>();
      if (j.contains("failure_reasons")) {
        r.rejection_reasons = j["failure_reasons"].get<std::map<std::string, std::uint64_t>>();
      }
    } catch (const nlohmann::json::exception&) {
      ++r.parse_failures["sidecar"];
    }
  }
  return r;
}

StatsReport corpus_stats(const std::string& path) {
  StatsReport r;
  r.kind = "corpus";
  IngestStats st;
  auto index = ingest_corpus(path, {}, &st);
  r.records = index.size();
  for (const auto& e : index.entries()) {
    ++r.pattern_histogram[e.pattern];
    ++r.step_histogram[static_cast<int>(e.program.size())];
    ++r.split_counts[e.split];
  }
  for (const auto& [k, v] : st.failure_kinds) r.parse_failures[k] = static_cast<std::uint64_t>(v);
  if (st.skipped_step_range) r.rejection_reasons["step_range"] = static_cast<std::uint64_t>(st.skipped_step_range);
  if (st.skipped_level) r.rejection_reasons["level"] = static_cast<std::uint64_t>(st.skipped_level);
  if (st.rows) r.acceptance_rate = static_cast<double>(st.admitted) / static_cast<double>(st.rows);
  return r;
}

}  // namespace

StatsReport run_stats(const std::string& path) {
  return ends_with(path, ".jsonl") ? dataset_stats(path) : corpus_stats(path);
}

}  // namespace synthqa
