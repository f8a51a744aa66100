#pragma once

#include <stdexcept>
#include <string>

namespace replisum {

// Error categories map one-to-one onto CLI exit codes (see tools/commands.cpp).

/// Invalid argument or parameter combination (exit code 1).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Missing or inconsistent inputs for the requested operation (exit code 1).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed dataset content (exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature or root finding failed to meet its tolerance (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A design target cannot be reached: the achievable ceiling is reported.
class UnattainableError : public DomainError {
 public:
  UnattainableError(const std::string& what, double ceiling)
      : DomainError(what), ceiling_(ceiling) {}
  double ceiling() const noexcept { return ceiling_; }

 private:
  double ceiling_;
};

}  // namespace replisum
