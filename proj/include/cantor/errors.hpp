#pragma once

// Failure taxonomy shared across modules; the CLI maps these onto exit codes.

#include <stdexcept>
#include <string>

namespace cantor {

// A scenario hypothesis does not hold at the requested scale (eg. a ball
// cannot host the requested number of mutually separated members).
struct HypothesisViolation : std::runtime_error {
  explicit HypothesisViolation(const std::string& what) : std::runtime_error(what) {}
};

// A report or configuration failed an exact re-check.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A search exhausted its budget without reaching a verdict.
struct BudgetExhausted : std::runtime_error {
  explicit BudgetExhausted(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cantor
