#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cfgraph {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed grammar text or an inconsistent Grammar value.
class GrammarError : public Error {
 public:
  explicit GrammarError(const std::string& what,
                        std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what),
        line_(line) {}

  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::optional<std::size_t> line_;
};

// An enumeration or search ran past its configured work cap. The result is
// inconclusive, not negative.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A walk that is discontinuous or names arcs the diagram does not have.
class WalkError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its domain (non-CNF grammar for CYK,
// improper walk for derivation recovery, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace cfgraph
