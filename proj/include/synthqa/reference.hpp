#pragma once

#include <span>
#include <vector>

#include "synthqa/fact_store.hpp"
#include "synthqa/interpreter.hpp"
#include "synthqa/program.hpp"

/// Naive reference semantics for every registered primitive. It scans the raw
/// fact list and uses quadratic loops with no indexes or hashing, so it shares
/// no lookup code with the production interpreter. Used as the test oracle and
/// by the cheat checker.
namespace synthqa::reference {

Value eval_primitive(const PrimitiveCall& call, std::span<const Operand> operands, const FactStore& store,
                     const ValueType& out_type, int step = 0);

std::vector<Value> execute_steps(const TypedProgram& program, const FactStore& store);

}  // namespace synthqa::reference
