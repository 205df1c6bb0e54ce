#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dit {

using Complex = std::complex<double>;

/// Bad input: a parameter violates an operation's precondition.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not produce a trustworthy result (exit code 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// exp(-z^2) does not fit in a double, so neither does w(z).
class FaddeevaOverflow : public NumericError {
 public:
  explicit FaddeevaOverflow(Complex z);
  Complex argument() const noexcept { return z_; }

 private:
  Complex z_;
};

/// The one-particle normalization integral diverges (k0I = 0).
class NormalizationDivergence : public ValidationError {
 public:
  NormalizationDivergence();
};

/// Iterative refinement (root finder, extremum search, fit) gave up.
class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace dit
