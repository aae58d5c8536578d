#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synthqa/program.hpp"
#include "synthqa/rng.hpp"

namespace synthqa {

enum class PerturbMechanism : std::uint8_t { kEntitySwap, kRetrievedPredicate };

std::string_view to_string(PerturbMechanism m);
std::optional<PerturbMechanism> parse_mechanism(std::string_view text);

struct PerturbedPredicate {
  Predicate predicate;
  PerturbMechanism mechanism = PerturbMechanism::kEntitySwap;
};

/// Corpus predicates indexed by the type of the step they ground.
class PredicatePool {
 public:
  /// primitive, when given, restricts retrieval to steps of the same primitive.
  void add(const Predicate& p, const ValueType& t, std::optional<PrimitiveId> primitive = std::nullopt);
  std::size_t size() const { return entries_.size(); }

  struct Entry {
    Predicate predicate;
    ValueType type;
    std::optional<PrimitiveId> primitive;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// |shared lowercase tokens| / |tokens of original| over token sets.
double word_overlap(std::string_view original, std::string_view candidate);

/// A closely similar replacement for the mention's text: numbers within ±20%,
/// years shifted by 1-5, adjacent ordinals, a different name. Never equal to the original.
std::string swap_mention_text(std::string_view mention, MentionKind kind, Rng& rng);

/// Text with one mention (chosen by rng) replaced.
std::string swap_one_mention(const Predicate& p, Rng& rng);

/// Swaps one entity mention when the predicate has any; otherwise samples from
/// the 30 type-consistent pool predicates with the highest overlap, excluding
/// overlap above 0.75. Throws PoolExhausted when no candidate exists.
PerturbedPredicate perturb_predicate(const Predicate& p, const ValueType& type, const PredicatePool& pool, Rng& rng,
                                     std::optional<PrimitiveId> primitive = std::nullopt);

}  // namespace synthqa
