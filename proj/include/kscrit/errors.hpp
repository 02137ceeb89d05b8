#pragma once

#include <stdexcept>
#include <string>

namespace kscrit {

// Bad arguments or malformed data (wrong grid, non-monotone values, ...).
struct invalid_input : std::invalid_argument {
  explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

// An iteration failed to converge (fixed point, contraction, bisection).
struct no_convergence : std::runtime_error {
  explicit no_convergence(const std::string& what) : std::runtime_error(what) {}
};

// A solver broke down mid-run; carries the last valid abscissa/time when known.
struct numerical_failure : std::runtime_error {
  double last_valid = 0.0;
  explicit numerical_failure(const std::string& what, double last = 0.0)
      : std::runtime_error(what), last_valid(last) {}
};

// Two independent routes disagree beyond the certified tolerance.
struct inconsistency_error : std::runtime_error {
  explicit inconsistency_error(const std::string& what) : std::runtime_error(what) {}
};

// A scheme invariant was violated beyond tolerance after a step.
struct constraint_violation : std::runtime_error {
  explicit constraint_violation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kscrit
