#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dvpsched {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent inputs, e.g. a policy that has no action for a visited state.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The problem has no feasible point (e.g. the box [1, N-1] is empty).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration would exceed its configured size cap.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(const std::string& what, double count, double cap)
      : std::runtime_error(what + ": " + std::to_string(static_cast<long double>(count)) +
                           " candidates exceed cap " + std::to_string(static_cast<long double>(cap))),
        count_(count),
        cap_(cap) {}

  double count() const noexcept { return count_; }
  double cap() const noexcept { return cap_; }

 private:
  double count_;
  double cap_;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dvpsched
