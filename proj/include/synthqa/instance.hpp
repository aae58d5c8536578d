#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synthqa/perturb.hpp"
#include "synthqa/program.hpp"

namespace synthqa {

struct PerturbedStep {
  Predicate original;
  Predicate perturbed;
  PerturbMechanism mechanism = PerturbMechanism::kEntitySwap;
  friend bool operator==(const PerturbedStep&, const PerturbedStep&) = default;
};

/// Per-step predicate replacements that define the contrastive question.
struct PerturbationRecord {
  std::vector<std::optional<PerturbedStep>> steps;

  bool empty() const;
  /// The program with every recorded step predicate replaced.
  TypedProgram apply(const TypedProgram& gold) const;
  friend bool operator==(const PerturbationRecord&, const PerturbationRecord&) = default;
};

/// One emitted question/context/answer record.
struct QAInstance {
  std::string id;
  std::string question;
  std::string context;
  std::vector<std::string> answers;
  TypedProgram program;
  std::string pattern;
  int num_facts = 0;
  int cardinality = 0;

  // meta
  std::string question_id;
  std::string source_dataset;
  std::uint64_t seed = 0;
  std::string split = "train";
  PerturbationRecord perturbation;
  std::vector<std::string> distractor_answers;

  // Fields this version does not know, kept verbatim as JSON text.
  std::string extra_fields = "{}";
  std::string extra_meta = "{}";
};

}  // namespace synthqa
