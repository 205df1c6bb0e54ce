#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) on the whole complex plane.
//
// Upper half-plane, |z| >= 8: Laplace continued fraction, evaluated
// backwards from a fixed depth.
// Upper half-plane, |z| < 8: Weideman's rational expansion in
// Z = (L + iz)/(L - iz) with 40 terms, coefficients built once from a
// discrete cosine sum.
// Lower half-plane: w(z) = 2 exp(-z^2) - w(-z), with exp(-z^2) formed from a
// compensated z^2 so the phase stays accurate when |z|^2 is in the
// thousands.
//
// Relative accuracy is around 1e-15 wherever w(z) is representable.

#include "dit/error.hpp"

namespace dit {

/// w(z). Throws FaddeevaOverflow when a component of w(z) exceeds the
/// double range (deep in the lower half-plane), ValidationError for
/// non-finite z.
Complex wofz(Complex z);

/// dw/dz = -2 z w(z) + 2i/sqrt(pi).
Complex wofz_deriv(Complex z);

/// exp(-z^2) with a compensated exponent. Throws FaddeevaOverflow if a
/// component would overflow.
Complex exp_neg_square(Complex z);

}  // namespace dit
