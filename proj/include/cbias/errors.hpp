#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbias {

/// Bad arguments or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A zero set or file violates its invariants.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Query beyond the completeness horizon of a zero set.
class HorizonError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// C1^+ == C2^+: the two prime counting functions coincide and no limiting distribution exists.
class RaceUndefined : public std::domain_error {
 public:
  RaceUndefined() : std::domain_error("race undefined: pi functions identical (C1+ == C2+)") {}
};

/// Internal consistency check failed (CLI exit code 3).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cbias
