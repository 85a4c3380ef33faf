#pragma once

#include <stdexcept>
#include <string>

namespace heisenbound {

/// Precondition violated by the caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method did not reach its tolerance. `residual` is the best
/// residual reached and `converged` the number of items that did converge
/// (root finders report 0 or 1, eigensolvers the number of eigenpairs).
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double residual, int converged = 0)
      : std::runtime_error(what), residual_(residual), converged_(converged) {}

  double residual() const noexcept { return residual_; }
  int converged() const noexcept { return converged_; }

 private:
  double residual_;
  int converged_;
};

/// A spectral sum was requested above the largest computed eigenvalue, where
/// the truncated spectrum would silently under-count.
class CoverageError : public std::runtime_error {
 public:
  CoverageError(const std::string& what, double lambda, double covered_up_to)
      : std::runtime_error(what), lambda_(lambda), covered_up_to_(covered_up_to) {}

  double lambda() const noexcept { return lambda_; }
  double covered_up_to() const noexcept { return covered_up_to_; }

 private:
  double lambda_;
  double covered_up_to_;
};

}  // namespace heisenbound
