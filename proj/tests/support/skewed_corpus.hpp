#pragma once

// Synthetic long-tailed corpus built from the seed table: one representative
// row per pattern, replicated under fresh question ids.

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "synthqa/corpus.hpp"
#include "synthqa/errors.hpp"

namespace synthqa::testing {

inline std::string csv_field(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// `rows` rows over the first `patterns` patterns (sorted order); the first
/// pattern holds round(head_share * rows) of them, the rest share the remainder.
inline std::string skewed_corpus_text(const std::string& seed_path, int patterns, double head_share, int rows) {
  auto index = ingest_corpus(seed_path);
  if (index.patterns().size() < static_cast<std::size_t>(patterns)) throw Error("seed corpus has too few patterns");
  std::vector<const CorpusEntry*> reps;
  for (const auto& [sig, ids] : index.patterns()) {
    if (static_cast<int>(reps.size()) == patterns) break;
    reps.push_back(&index.entries()[ids.front()]);
  }
  std::vector<int> copies(static_cast<std::size_t>(patterns), 0);
  int head = static_cast<int>(head_share * rows + 0.5);
  copies[0] = head;
  for (int i = 0; i < rows - head; ++i) ++copies[1 + static_cast<std::size_t>(i % (patterns - 1))];
  std::ostringstream out;
  out << "question_id,question_text,decomposition,split\n";
  for (std::size_t p = 0; p < reps.size(); ++p) {
    const auto& d = reps[p]->decomposition;
    std::string qdmr;
    for (const auto& s : d.steps) qdmr += (qdmr.empty() ? "return " : " ;return ") + s.raw;
    for (int k = 0; k < copies[p]; ++k) {
      out << csv_field(d.question_id + "_r" + std::to_string(k)) << ',' << csv_field(d.question_text) << ','
          << csv_field(qdmr) << ",train\n";
    }
  }
  return out.str();
}

}  // namespace synthqa::testing
