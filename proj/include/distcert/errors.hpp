#pragma once

#include <stdexcept>
#include <string>

namespace distcert {

/// Syntax error in an input file, with 1-based position.
struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int col = 0)
      : std::runtime_error("line " + std::to_string(line) +
                           (col > 0 ? ":" + std::to_string(col) : "") + ": " +
                           msg),
        line(line), col(col) {}
  int line;
  int col;
};

/// Well-formed input that violates a model invariant.
struct SemanticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Misuse of an API contract (dimension mismatch, unassigned variable, ...).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

} // namespace distcert
