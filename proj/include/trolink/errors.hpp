#pragma once

#include <stdexcept>
#include <string>

namespace trolink {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent arguments (dimension mismatch, non-finite
/// entries, a map whose images escape its declared target, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A matrix was required to lie in a span and does not.
class NotInSpan : public Error {
 public:
  NotInSpan(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A nondegeneracy hypothesis does not hold, so the requested
/// construction is not defined.
class Degeneracy : public Error {
 public:
  using Error::Error;
};

/// An operation's documented precondition on its mathematical input
/// failed (e.g. a candidate expectation that is not one).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Should not happen; indicates a bug or a numerically hopeless input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace trolink
