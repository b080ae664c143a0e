#pragma once

#include <stdexcept>
#include <string>

namespace zdpot {

// Invalid arguments or configuration; the CLI maps this to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A point or set lies outside the domain an operation was asked to act on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A linear solve did not reach its residual target.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Adaptive series truncation hit its hard step cap.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No integer chain length fits the certificate window, or the inputs are outside it.
class InfeasibleCertificate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition or postcondition failure in the Balayage construction.
class BalayageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// On-disk cache file is malformed or its contents do not re-derive.
class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zdpot
