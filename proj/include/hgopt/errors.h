#pragma once

#include <stdexcept>
#include <string>

namespace hgopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (mismatched manifolds,
/// tangent vectors at different base points, bad parameters).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A geodesic left the coordinate chart of a manifold with boundary.
class DomainExitError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine failed. Carries the final residual.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace hgopt
