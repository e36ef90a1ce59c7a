#pragma once

#include <stdexcept>
#include <string>

namespace edgelab {

/// Violated precondition or invalid model construction.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Quadrature or root finding did not reach the requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested law or parameter split does not exist.
class Infeasible : public std::domain_error {
 public:
  Infeasible(const std::string& what, double limit) : std::domain_error(what), limit_(limit) {}
  /// The boundary value that would have been feasible.
  double limit() const noexcept { return limit_; }

 private:
  double limit_;
};

}  // namespace edgelab
