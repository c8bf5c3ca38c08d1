#pragma once

#include <stdexcept>
#include <string>

namespace tbdde {

/// Model file could not be parsed; message carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Model definition violates an invariant (bad dimensions, constant term, ...).
class ModelError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The linear part does not have the double-zero structure of a
/// Takens-Bogdanov point (wrong rank deficiency, unsolvable chain, or
/// degenerate normalization).
class NotTBCandidate : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A mathematical precondition of an operation fails (a = 0, nu = 0, ...).
class PreconditionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bisection bracket endpoints do not straddle the sought transition.
class NoSignChange : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Projected normal form has support outside the expected resonant monomials.
class StructureViolation : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iteration produced a nonfinite state.
class OverflowDiverged : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configured size cap (basis dimension, dense eigensolve) was exceeded.
class CapExceeded : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Internal consistency check failed after an otherwise valid computation.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tbdde
