#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selmon {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a model invariant (stochasticity, totality, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An exploration exceeded its configured node cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The requested analysis is not available for this model (e.g. hidden MC).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace selmon
