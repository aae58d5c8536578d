#pragma once

// The worked touchdown example: hand-built facts, gold and contrastive program.

#include "synthqa/fact_store.hpp"
#include "synthqa/instance.hpp"
#include "synthqa/qdmr_parser.hpp"
#include "synthqa/type_inference.hpp"

namespace synthqa::testing {

inline QAInstance touchdown_instance() {
  QAInstance inst;
  inst.id = "touchdown";
  inst.question = "How many touchdowns did Edward throw in the 1st quarter?";
  inst.program = infer_types(
      parse_program_text(R"(select("touchdowns by Edward") ; filter(#1, "from the 1st quarter") ; count(#2))"),
      inst.question);
  inst.pattern = "select filter count";
  inst.answers = {"2"};
  inst.distractor_answers = {"1"};
  inst.cardinality = 1;
  inst.perturbation.steps = {
      PerturbedStep{Predicate("touchdowns by Edward"), Predicate("touchdowns by Tom"), PerturbMechanism::kEntitySwap},
      PerturbedStep{Predicate("from the 1st quarter"), Predicate("from the 2nd quarter"),
                    PerturbMechanism::kEntitySwap},
      std::nullopt};
  return inst;
}

inline FactStore touchdown_store() {
  FactStore s;
  auto add = [&](const char* pred, std::initializer_list<const char*> names, Chain chain) {
    for (const char* n : names) {
      s.add(Fact{Predicate(pred), "select", Value::entity(n), std::nullopt, chain});
    }
  };
  add("touchdowns by Edward", {"ABC", "DXE", "FGH", "PQR"}, Chain::kGold);
  add("from the 1st quarter", {"ABC", "DXE", "MNF", "IOU"}, Chain::kGold);
  add("touchdowns by Tom", {"MNF", "KLO", "UVW"}, Chain::kDistractor);
  add("from the 2nd quarter", {"KLO", "FGH", "RST"}, Chain::kDistractor);
  return s;
}

}  // namespace synthqa::testing
