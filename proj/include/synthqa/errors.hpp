#pragma once

#include <stdexcept>
#include <string>

namespace synthqa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A QDMR step matched no rule.
class ParseError : public Error {
 public:
  ParseError(int step_index, std::string raw, const std::string& why = "no rule matches")
      : Error("step " + std::to_string(step_index) + ": " + why + ": '" + raw + "'"),
        step_index_(step_index),
        raw_(std::move(raw)) {}
  int step_index() const { return step_index_; }
  const std::string& raw() const { return raw_; }

 private:
  int step_index_;
  std::string raw_;
};

/// A "#k" back-reference points outside [1, i-1].
class ReferenceError : public Error {
 public:
  ReferenceError(int step_index, int target)
      : Error("step " + std::to_string(step_index) + " references #" + std::to_string(target)),
        step_index_(step_index),
        target_(target) {}
  int step_index() const { return step_index_; }
  int target() const { return target_; }

 private:
  int step_index_;
  int target_;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Unsatisfiable typing; both constraint descriptions carry their origin.
class TypeConflict : public Error {
 public:
  TypeConflict(int step, std::string first, std::string second)
      : Error("type conflict at step " + std::to_string(step) + ": " + first + " vs " + second),
        step_(step),
        first_(std::move(first)),
        second_(std::move(second)) {}
  int step() const { return step_; }
  const std::string& first() const { return first_; }
  const std::string& second() const { return second_; }

 private:
  int step_;
  std::string first_;
  std::string second_;
};

enum class ExecErrorKind {
  kMissingGrounding,
  kRuntimeTypeMismatch,
  kDivisionByZero,
  kEmptyAggregation,
  kOutOfRange,
};

const char* to_string(ExecErrorKind kind);

/// Raised by the interpreters. step is 1-based, 0 when evaluated outside a program.
class ExecError : public Error {
 public:
  ExecError(ExecErrorKind kind, int step, const std::string& detail = {})
      : Error(std::string(to_string(kind)) + " at step " + std::to_string(step) +
              (detail.empty() ? "" : ": " + detail)),
        kind_(kind),
        step_(step) {}
  ExecErrorKind kind() const { return kind_; }
  int step() const { return step_; }

 private:
  ExecErrorKind kind_;
  int step_;
};

class PoolExhausted : public Error {
 public:
  using Error::Error;
};

class NoTemplate : public Error {
 public:
  explicit NoTemplate(const std::string& primitive)
      : Error("no template for primitive " + primitive) {}
};

class CorpusEmpty : public Error {
 public:
  CorpusEmpty() : Error("corpus is empty") {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class MissingPerturbationRecord : public Error {
 public:
  using Error::Error;
};

}  // namespace synthqa
