#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "synthqa/fact_store.hpp"
#include "synthqa/instance.hpp"

namespace synthqa {

/// Scalar value as a tagged string ("e:ABC", "n:30", "d:1990-5-1", "b:1").
std::string encode_value(const Value& v);
std::optional<Value> decode_value(std::string_view text);

/// One JSON object: id, question, context, answers, program, pattern,
/// num_facts, cardinality, meta. Unknown fields read earlier are written back.
std::string to_json_line(const QAInstance& inst);
/// Throws SchemaError on malformed or incomplete records.
QAInstance instance_from_json(std::string_view line);

/// Facts sidecar record: {"id", "facts": [...]}.
std::string facts_to_json_line(const std::string& id, const FactStore& store);
std::pair<std::string, FactStore> facts_from_json(std::string_view line);

/// Line reader that skips blank lines. Throws IoError when the file cannot be opened.
class JsonlReader {
 public:
  explicit JsonlReader(const std::string& path);
  bool next(std::string& line);
  std::size_t line_number() const { return line_no_; }

 private:
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace synthqa
