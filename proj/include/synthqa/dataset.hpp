#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "synthqa/corpus.hpp"
#include "synthqa/generator.hpp"

namespace synthqa {

/// One mention of the question replaced by a similar value of the same kind.
struct EntitySubstitution {
  std::string original;
  std::string replacement;
};

/// Text with every whole-token occurrence of s.original replaced.
std::string apply_substitution(std::string_view text, const EntitySubstitution& s);

/// With probability p, replaces one detected mention of q (unchanged when q has none).
std::string perturb_question_entities(std::string_view q, Rng& rng, double p = 0.5);

/// Same draw for a whole request: only mentions that also occur in a step
/// predicate are candidates, and the substitution is applied to the question
/// and to every predicate. Returns the substitution made, if any.
std::optional<EntitySubstitution> perturb_request_entities(GenerationRequest& request, Rng& rng, double p = 0.5);

struct DatasetConfig {
  std::uint64_t target_size = 1000;
  bool balanced = true;
  double entity_perturb_probability = 0.5;
  // Fraction of question ids routed to the dev split by hash; 0 keeps the corpus split column.
  double dev_fraction = 0.0;
  int workers = 1;
  // Sampled slots give up after this many; 0 = 50 * target_size + 1000.
  std::uint64_t max_slots = 0;
  std::uint64_t seed = 0;
  GenerationConfig generation;
};

struct DatasetStats {
  std::uint64_t slots = 0;
  std::uint64_t accepted = 0;
  std::uint64_t attempts = 0;
  std::uint64_t train = 0;
  std::uint64_t dev = 0;
  std::uint64_t entity_perturbed = 0;
  std::map<std::string, std::uint64_t> pattern_counts;
  std::map<std::string, std::uint64_t> failure_reasons;

  /// Accepted instances per sampled slot.
  double acceptance_rate() const;
  /// Share of instances held by the 10 most frequent patterns.
  double top10_share() const;
  std::string to_json() const;
};

/// Membership stable across runs: hash of the question id against the fraction.
bool in_dev_split(std::string_view question_id, double dev_fraction);

using InstanceSink = std::function<void(const GeneratedInstance&)>;

/// Samples slots until target_size instances are accepted and hands them to
/// sink in slot order. Output does not depend on cfg.workers. Throws CorpusEmpty.
DatasetStats generate_dataset(const PatternIndex& corpus, const DatasetConfig& cfg, const InstanceSink& sink,
                              const TemplateSet& templates = TemplateSet::builtin());

}  // namespace synthqa
