#pragma once

#include <string>
#include <vector>

#include "synthqa/fact_store.hpp"
#include "synthqa/instance.hpp"

namespace synthqa {

struct PropertyReport {
  bool pass = true;
  std::vector<int> violating_steps;  // 1-based
  std::string detail;
};

struct CheckReport {
  PropertyReport p1;
  PropertyReport p2;
  PropertyReport p3;
  /// The stored answers equal a fresh execution of the gold program.
  bool answers_match = true;

  bool pass() const { return p1.pass && p2.pass && p3.pass && answers_match; }
};

/// Dependent grounding steps: the answer is a proper subset of what the
/// predicate grounds on its own (filter members, projection subjects, boolean
/// members outside the input).
PropertyReport check_p1(const QAInstance& inst, const FactStore& store);

/// Dependent steps are not no-ops: filters and superlatives drop something,
/// reductions do not unwrap a singleton, sorts reorder, set operations and
/// other steps differ from every referenced input.
PropertyReport check_p2(const QAInstance& inst, const FactStore& store);

/// The perturbed program's answer on the same facts differs from the gold one.
/// Throws MissingPerturbationRecord when the instance has no perturbed step.
PropertyReport check_p3(const QAInstance& inst, const FactStore& store);

/// All three plus answer agreement; a missing perturbation record fails p3.
CheckReport check_instance(const QAInstance& inst, const FactStore& store);

}  // namespace synthqa
