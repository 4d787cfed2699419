#pragma once

#include <stdexcept>
#include <string>

namespace meltpinn {

// Raised when a caller breaks a documented precondition (shape mismatch,
// out-of-range argument, invalid configuration value).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a computation produces non-finite values or an iterative
// method fails to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by readers of external files; carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace meltpinn
