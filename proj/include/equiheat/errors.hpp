#pragma once

#include <stdexcept>
#include <string>

namespace equiheat {

/// Precondition violation (bad argument, out-of-domain request).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A series cutoff larger than the configured cap would be needed.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& msg, double required_cutoff, double cap)
      : std::runtime_error(msg), required_cutoff(required_cutoff), cap(cap) {}
  double required_cutoff;
  double cap;
};

/// Quadrature or sampling budget exhausted before reaching tolerance.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& msg, double achieved, double requested)
      : std::runtime_error(msg), achieved(achieved), requested(requested) {}
  double achieved;
  double requested;
};

/// Feature present in the data model but not instantiated (e.g. order q != 2).
class NotInstantiatedError : public std::runtime_error {
 public:
  explicit NotInstantiatedError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical analysis failed (rank instability, singular Hessian, bad fit).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Config file / experiment validation failure; names the offending key.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& key, const std::string& msg)
      : std::runtime_error("config key '" + key + "': " + msg), key(key) {}
  std::string key;
};

}  // namespace equiheat
