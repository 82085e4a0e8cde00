#pragma once

#include <stdexcept>
#include <string>

namespace asdp {

/// Shape or length mismatch in user-supplied data.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite input to a numerical kernel.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trial subspace collapsed even after the Householder fallback.
class SubspaceDegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The KKT matrix could not be factorized (zero pivot or wrong inertia).
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid problem data or settings detected before the first iteration.
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterate became non-finite. Carries the last iteration whose state was finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int last_finite_iteration, double last_norm)
      : std::runtime_error(what),
        last_finite_iteration_(last_finite_iteration),
        last_norm_(last_norm) {}

  int last_finite_iteration() const noexcept { return last_finite_iteration_; }
  double last_norm() const noexcept { return last_norm_; }

 private:
  int last_finite_iteration_;
  double last_norm_;
};

/// Sparse-SDPA parse failure; line numbers are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace asdp
