#pragma once

#include <stdexcept>
#include <string>

namespace memocheck {

/// Malformed source text. Carries the 1-based line of the offending token.
struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

/// Well-formed text that does not define a valid program (bad assertion head,
/// unknown property, non-regular type definition, ...).
struct DefinitionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised while executing a program: instantiation errors in arithmetic,
/// integer overflow, calls to undefined predicates.
struct ExecutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A broken internal invariant (unknown epoch, unknown state).
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace memocheck
