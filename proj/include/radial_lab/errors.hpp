#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radial_lab {

// Input lies outside the domain an operation is defined on (e.g. a point
// outside [0,1)^2, or arithmetic leaving exact dyadic precision).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A precondition on an argument was violated.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// direction_between called with x == y.
class DegeneratePairError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Harness inputs that fail validation (tube not meeting its cube,
// unverified certificate, family size out of tolerance).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A generator could not produce a set passing its advertised certificate.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace radial_lab
