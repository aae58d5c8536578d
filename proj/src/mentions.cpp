#include "synthqa/mentions.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "synthqa/value.hpp"

namespace synthqa {

std::string_view to_string(MentionKind k) {
  switch (k) {
    case MentionKind::kNumber: return "number";
    case MentionKind::kDate: return "date";
    case MentionKind::kEntity: return "named_entity";
    case MentionKind::kOrdinal: return "ordinal";
  }
  return "?";
}

namespace {

constexpr std::array<std::string_view, 10> kOrdinalWords = {
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth"};
constexpr std::array<std::string_view, 10> kCardinalWords = {
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};

// Capitalized words that are function words, not names.
constexpr std::array<std::string_view, 40> kNotNames = {
    "The",  "A",    "An",   "I",     "If",    "Is",   "Was",   "Were", "Did",   "Does",
    "Do",   "How",  "What", "Which", "Who",   "Whom", "When",  "Where", "Why",  "In",
    "On",   "Of",   "And",  "Or",    "For",   "By",   "At",    "To",   "From",  "With",
    "That", "This", "Are",  "Return", "Has",  "Have", "Had",   "It",   "Its",   "REF"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-';
}

int month_index(std::string_view word) {
  for (int m = 1; m <= 12; ++m) {
    if (word == month_name(m)) return m;
  }
  return 0;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

struct Token {
  std::size_t begin;
  std::size_t end;
  std::string_view text;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[j])) ||
              ((text[j] == ',' || text[j] == '.') && j + 1 < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[j + 1]))))) {
        ++j;
      }
      // ordinal suffix
      while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({i, j, text.substr(i, j - i)});
      i = j;
    } else if (c == '#') {
      std::size_t j = i + 1;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])))) ++j;
      out.push_back({i, j, text.substr(i, j - i)});
      i = j;
    } else if (is_word_char(c)) {
      std::size_t j = i;
      while (j < text.size() && is_word_char(text[j])) ++j;
      out.push_back({i, j, text.substr(i, j - i)});
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

bool is_capitalized_name(std::string_view w) {
  if (w.empty() || !std::isupper(static_cast<unsigned char>(w[0]))) return false;
  if (std::find(kNotNames.begin(), kNotNames.end(), w) != kNotNames.end()) return false;
  if (month_index(w) != 0) return false;
  return std::all_of(w.begin() + 1, w.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '\'' || c == '-';
  });
}

}  // namespace

int ordinal_value(std::string_view token) {
  std::string t = lower(token);
  for (std::size_t i = 0; i < kOrdinalWords.size(); ++i) {
    if (t == kOrdinalWords[i]) return static_cast<int>(i) + 1;
    // "one" is too often a pronoun to be treated as a count.
    if (i > 0 && t == kCardinalWords[i]) return static_cast<int>(i) + 1;
  }
  if (t.size() >= 3) {
    auto suffix = std::string_view(t).substr(t.size() - 2);
    auto digits = std::string_view(t).substr(0, t.size() - 2);
    if ((suffix == "st" || suffix == "nd" || suffix == "rd" || suffix == "th") && all_digits(digits) &&
        digits.size() <= 3) {
      return std::stoi(std::string(digits));
    }
  }
  return 0;
}

std::string ordinal_like(std::string_view original, int n) {
  std::string t = lower(original);
  bool capital = !original.empty() && std::isupper(static_cast<unsigned char>(original[0]));
  auto cap = [&](std::string_view w) {
    std::string s(w);
    if (capital && !s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  };
  bool cardinal = std::find(kCardinalWords.begin(), kCardinalWords.end(), t) != kCardinalWords.end();
  bool word = cardinal || std::find(kOrdinalWords.begin(), kOrdinalWords.end(), t) != kOrdinalWords.end();
  if (word && n >= 1 && n <= 10) {
    return cap(cardinal ? kCardinalWords[static_cast<std::size_t>(n - 1)]
                        : kOrdinalWords[static_cast<std::size_t>(n - 1)]);
  }
  std::string suffix = "th";
  if (n % 100 < 11 || n % 100 > 13) {
    if (n % 10 == 1) suffix = "st";
    else if (n % 10 == 2) suffix = "nd";
    else if (n % 10 == 3) suffix = "rd";
  }
  return std::to_string(n) + suffix;
}

std::vector<Mention> detect_mentions(std::string_view text) {
  auto tokens = tokenize(text);
  std::vector<Mention> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& tok = tokens[i];
    if (tok.text.front() == '#') continue;
    // D Month YYYY
    if (all_digits(tok.text) && tok.text.size() <= 2 && i + 2 < tokens.size() &&
        month_index(tokens[i + 1].text) && all_digits(tokens[i + 2].text) && tokens[i + 2].text.size() == 4) {
      out.push_back({tok.begin, tokens[i + 2].end, MentionKind::kDate});
      i += 2;
      continue;
    }
    if (ordinal_value(tok.text) > 0) {
      out.push_back({tok.begin, tok.end, MentionKind::kOrdinal});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(tok.text.front()))) {
      if (auto n = parse_number(tok.text)) {
        bool year = all_digits(tok.text) && tok.text.size() == 4 && *n >= kMinYear && *n <= kMaxYear;
        out.push_back({tok.begin, tok.end, year ? MentionKind::kDate : MentionKind::kNumber});
      }
      continue;
    }
    if (is_capitalized_name(tok.text)) {
      std::size_t j = i;
      while (j + 1 < tokens.size() && is_capitalized_name(tokens[j + 1].text) &&
             tokens[j + 1].begin == tokens[j].end + 1) {
        ++j;
      }
      out.push_back({tok.begin, tokens[j].end, MentionKind::kEntity});
      i = j;
    }
  }
  return out;
}

}  // namespace synthqa
