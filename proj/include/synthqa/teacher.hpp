#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "synthqa/fact_store.hpp"
#include "synthqa/instance.hpp"
#include "synthqa/registry.hpp"
#include "synthqa/rng.hpp"
#include "synthqa/templates.hpp"

namespace synthqa {

/// Facts and program behind one single-primitive question. Hidden facts
/// (family "query") pin down the program's inputs and are not rendered.
struct PrimitiveProblem {
  PrimitiveId primitive = PrimitiveId::kSelect;
  TypedProgram program;
  FactStore store;
  // Per store fact: render numbers with thousand separators.
  std::vector<bool> grouped;
  std::map<std::string, std::string, std::less<>> slots;
};

/// Random facts and program for the primitive.
PrimitiveProblem sample_primitive_problem(PrimitiveId primitive, Rng& rng);

/// Question from template number question_template (mod the template count),
/// context from the visible facts in store order, answers from the interpreter.
/// Throws NoTemplate, and Error when the reference interpreter disagrees.
QAInstance render_primitive_problem(const PrimitiveProblem& problem, std::size_t question_template,
                                    const TemplateSet& templates = TemplateSet::builtin());

using TeacherSink = std::function<void(const QAInstance&)>;

/// train_count then dev_count instances, ids "<primitive>-<split>-<index>".
/// Each instance draws from derive_seed(seed, "<primitive>/<split>", index).
void generate_primitive_instances(PrimitiveId primitive, std::uint64_t train_count, std::uint64_t dev_count,
                                  std::uint64_t seed, const TeacherSink& sink,
                                  const TemplateSet& templates = TemplateSet::builtin());

}  // namespace synthqa
