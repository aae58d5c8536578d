#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "synthqa/fact_store.hpp"
#include "synthqa/instance.hpp"
#include "synthqa/interpreter.hpp"
#include "synthqa/perturb.hpp"
#include "synthqa/qdmr_parser.hpp"
#include "synthqa/templates.hpp"

namespace synthqa {

struct GenerationConfig {
  int max_retries = 200;
  int max_facts = 25;
  std::set<int> answer_cardinalities{1, 2, 3, 4};
  // Entities per grounding step when no consumer fixes the size.
  int gold_pool_min = 3;
  int gold_pool_max = 6;
  // Entities grounded only for the perturbed predicates.
  int distractor_pool_min = 2;
  int distractor_pool_max = 4;
  double step_perturb_probability = 0.5;
  std::uint64_t seed = 0;

  /// Throws Error when a field is out of range.
  void validate() const;
};

/// Why attempts were rejected, by reason name.
struct Failure {
  std::map<std::string, int> reasons;
  int attempts = 0;
};

struct GenerationRequest {
  std::string question;
  std::string question_id;
  std::string source_dataset;
  TypedProgram program;
};

struct GeneratedInstance {
  QAInstance instance;
  FactStore facts;
  int attempts = 0;
};

struct GenerationResult {
  std::optional<GeneratedInstance> generated;
  Failure failure;

  bool ok() const { return generated.has_value(); }
};

/// Answer cardinalities the final step can take at all (a scalar final gives {1},
/// top-k gives {k}). Sizes outside cfg.answer_cardinalities are still listed.
std::set<int> feasible_cardinalities(const TypedProgram& program);

/// Cardinality of the gold final is N, the store is within the fact budget and
/// the two chains end differently.
bool accept(const Value& gold_final, const Value& distractor_final, const FactStore& store, int N,
            const GenerationConfig& cfg);

/// Repeated grounding attempts until one passes accept() and the cheat checker,
/// at most cfg.max_retries of them. pool supplies retrieved predicates for
/// steps without entity mentions; the request's own predicates are always added.
GenerationResult generate_instance(const GenerationRequest& request, int N, const GenerationConfig& cfg,
                                   const PredicatePool& pool = {},
                                   const TemplateSet& templates = TemplateSet::builtin());

/// Parses, normalizes and types the decomposition first (throws on failure).
GenerationResult generate_instance(std::string_view question, const Decomposition& d, int N,
                                   const GenerationConfig& cfg, const PredicatePool& pool = {},
                                   const TemplateSet& templates = TemplateSet::builtin());

/// Grounds one gold step (1-based) whose inputs are already in state.ans and
/// stores its value there. want fixes the size of a collection result (0 = any).
/// Returns false when the step cannot be grounded with a proper-subset reserve.
bool ground_predicate(const TypedProgram& program, int step, ChainState& state, FactStore& store, Rng& rng,
                      int want = 0);

/// Program typed from a decomposition with the built-in rule table.
TypedProgram compile(const Decomposition& d);

}  // namespace synthqa
