#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace synthqa {

enum class MentionKind : std::uint8_t { kNumber, kDate, kEntity, kOrdinal };

std::string_view to_string(MentionKind k);

/// Byte span [begin, end) within the text it was detected in.
struct Mention {
  std::size_t begin = 0;
  std::size_t end = 0;
  MentionKind kind = MentionKind::kEntity;

  std::string_view in(std::string_view text) const { return text.substr(begin, end - begin); }
  friend bool operator==(const Mention&, const Mention&) = default;
};

/// Finds numbers, dates (years 1100-2022 and "D Month YYYY"), ordinals
/// ("1st", "second", cardinal words such as "two") and capitalized name runs.
/// Capitalized function words ("How", "The", ...) and month names are not names.
std::vector<Mention> detect_mentions(std::string_view text);

/// Ordinal value of "1st"/"first"/"two" style tokens, 0 when not an ordinal.
int ordinal_value(std::string_view token);
/// Renders n in the same style as the original token ("1st" -> "2nd", "first" -> "second").
std::string ordinal_like(std::string_view original, int n);

}  // namespace synthqa
