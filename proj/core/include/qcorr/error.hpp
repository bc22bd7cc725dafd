#pragma once

#include <stdexcept>
#include <string>

namespace qcorr {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (shape, range, ordering).
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Input geometry is too degenerate for the requested construction
/// (collinear triangulation input, zero-area polygon, ...).
class DegenerateGeometry : public Error {
public:
  using Error::Error;
};

/// A numerical backend did not converge. The message echoes the offending
/// matrix or sample location.
class NumericalFailure : public Error {
public:
  using Error::Error;
};

/// Malformed external input (matrix files, CLI values). Carries the 1-based
/// line number when one applies, 0 otherwise.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace qcorr
