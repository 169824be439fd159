#pragma once

#include <stdexcept>
#include <string>

namespace ctapf {

// Error family is intentionally flat: callers catch by category, message carries detail.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text or JSON (bad characters, ragged rows, wrong shape).
struct FormatError : Error {
  using Error::Error;
};

// Precondition violated by a caller (query on an obstacle, index out of range).
struct DomainError : Error {
  using Error::Error;
};

// No route exists between two queried cells.
struct UnreachableError : Error {
  using Error::Error;
};

// The instance (or one search node) admits no solution under its constraints.
struct InfeasibleError : Error {
  using Error::Error;
};

// A configured node/state/time budget ran out before a solution was found.
struct BudgetError : Error {
  using Error::Error;
};

// Internal contract broken: data that must line up does not.
struct ContractError : Error {
  using Error::Error;
};

// Two pending tasks share a start cell and an idle agent stands on it.
struct AmbiguityError : Error {
  using Error::Error;
};

// Scenario sampling could not satisfy its constraints within bounded retries.
struct GenerationError : Error {
  using Error::Error;
};

}  // namespace ctapf
