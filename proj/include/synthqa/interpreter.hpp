#pragma once

#include <span>
#include <variant>
#include <vector>

#include "synthqa/fact_store.hpp"
#include "synthqa/program.hpp"

namespace synthqa {

/// A call argument after step references are replaced by their values.
using Operand = std::variant<Comparator, Value>;

/// Step-wise answers for the gold chain (ans) and distractor chain (dis).
struct ChainState {
  std::vector<Value> ans;
  std::vector<Value> dis;

  std::vector<Value>& of(Chain c) { return c == Chain::kGold ? ans : dis; }
  const std::vector<Value>& of(Chain c) const { return c == Chain::kGold ? ans : dis; }
};

/// Replaces StepRef arguments with values from `steps` (0-based by step-1).
std::vector<Operand> resolve_operands(const PrimitiveCall& call, std::span<const Value> steps);

/// Evaluates one primitive. out_type disambiguates select (scalar, list or
/// dictionary); `step` is only used to label errors. Throws ExecError.
Value eval_primitive(const PrimitiveCall& call, std::span<const Operand> operands, const FactStore& store,
                     const ValueType& out_type, int step = 0);

/// Runs every step in order and returns the per-step values; the last one is
/// the answer. Each value is checked against the step's inferred type.
std::vector<Value> execute_steps(const TypedProgram& program, const FactStore& store);

/// Executes and records the per-step values into state.of(chain); returns the final value.
Value execute(const TypedProgram& program, const FactStore& store, ChainState& state, Chain chain);

/// Copy of the program with step predicates replaced where `replacements`
/// holds a value (indexed by step, 0-based).
TypedProgram with_predicates(const TypedProgram& program, std::span<const std::optional<Predicate>> replacements);

}  // namespace synthqa
