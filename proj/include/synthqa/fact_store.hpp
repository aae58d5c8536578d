#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "synthqa/program.hpp"
#include "synthqa/value.hpp"

namespace synthqa {

enum class Chain : std::uint8_t { kGold, kDistractor };

std::string_view to_string(Chain c);
std::optional<Chain> parse_chain(std::string_view text);

/// A grounded predicate. Without an object it asserts membership
/// ("ABC is one of the touchdowns by Edward"); with one it asserts an attribute
/// ("the yard line of ABC is 30"). family selects the sentence template.
struct Fact {
  Predicate predicate;
  std::string family;
  Value subject;
  std::optional<Value> object;
  Chain chain = Chain::kGold;

  bool is_attribute() const { return object.has_value(); }
};

/// Stable hashing key for a scalar value ("e:ABC", "n:30", "d:1990").
std::string scalar_key(const Value& v);

/// Insertion-ordered set of facts with per-predicate indexes.
/// (predicate, subject, object) triples are unique, and an attribute has at
/// most one object per (predicate, subject).
class FactStore {
 public:
  enum class AddResult { kAdded, kDuplicate, kConflict };

  AddResult add(Fact fact);

  const std::vector<Fact>& facts() const { return facts_; }
  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }

  bool has_predicate(std::string_view predicate) const;
  bool has_membership(std::string_view predicate, const Value& subject) const;
  std::optional<Value> attribute(std::string_view predicate, const Value& subject) const;
  /// Membership subjects for the predicate, in insertion order.
  std::vector<Value> members(std::string_view predicate) const;
  /// Attribute facts for the predicate as (subject, object), in insertion order.
  Dict attributes(std::string_view predicate) const;
  /// Every subject asserted under the predicate, membership or attribute.
  std::vector<Value> subjects(std::string_view predicate) const;

 private:
  struct PredicateIndex {
    std::vector<std::size_t> facts;
    std::unordered_set<std::string> members;
    std::unordered_map<std::string, std::size_t> attributes;
  };

  std::vector<Fact> facts_;
  std::unordered_map<std::string, PredicateIndex> index_;
};

}  // namespace synthqa
