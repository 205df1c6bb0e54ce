#pragma once

// Free particle (mass 1/2, hbar = 1) emitted by a point source at x = 0 with
// boundary value psi(0, t) = exp(-i omega0 t) Theta(t).
//
// Units: length in inverse real carrier wavenumbers, time in carrier periods
// over 2 pi, so k0 = 1 + i k0I always. A carrier with general real part is
// reached by the scaling x -> k0R x, t -> k0R^2 t (see scaled_sample).

#include <span>
#include <vector>

#include "dit/error.hpp"

namespace dit {

/// Complex emission pole k0 = 1 + i k0I and omega0 = k0^2.
struct Carrier {
  double k0I = 0.0;
  Complex k0{1.0, 0.0};
  Complex omega0{1.0, 0.0};
  double tau0 = 0.0;  ///< lifetime 1/(4|k0I|); +inf for k0I = 0

  double omega0R() const noexcept { return omega0.real(); }
  double omega0I() const noexcept { return omega0.imag(); }
  /// 2 pi / omega0R, the asymptotic DIT period.
  double period() const noexcept;
};

/// Requires -1 < k0I <= 0.
Carrier make_carrier(double k0I);

/// Evaluation point (x, t) together with the quantities every formula reuses.
struct SpacetimePoint {
  double x = 0.0;
  double t = 0.0;
  double ks = 0.0;       ///< saddle wavenumber x / 2t
  double vs = 0.0;       ///< saddle velocity x / t
  Complex tau;           ///< x / 2k0
  Complex u0p;           ///< (1+i) sqrt(t/2) k0 (1 - tau/t)
  Complex u0m;           ///< -(1+i) sqrt(t/2) k0 (1 + tau/t)
};

/// Requires x >= 0 and t > 0.
SpacetimePoint make_point(const Carrier& c, double x, double t);

struct WaveSample {
  Complex psi;
  Complex psi_x;
  double density = 0.0;
  double flux = 0.0;  ///< 2 Im(conj(psi) psi_x)
};

/// Exact unnormalized wavefunction, 0.5 e^{i ks^2 t} [w(-u0+) + w(-u0-)].
Complex psi_exact(const Carrier& c, const SpacetimePoint& p);
/// Closed-form d psi / dx.
Complex psi_x_exact(const Carrier& c, const SpacetimePoint& p);
WaveSample sample(const Carrier& c, const SpacetimePoint& p);

/// Exact solution for a carrier k0R (1 + i k0I/k0R) with arbitrary k0R > 0,
/// obtained from the unit-carrier solution by rescaling.
WaveSample scaled_sample(double k0R, double k0I, double x, double t);

/// Total emitted probability, integral of J(0, t) over t > 0.
/// Throws NormalizationDivergence for k0I = 0.
double norm_constant(const Carrier& c);

struct TracePoint {
  double t = 0.0;
  double density = 0.0;
  double flux = 0.0;
};

/// Density and flux at fixed x along t_grid (strictly increasing, positive).
/// With `normalized`, both are divided by norm_constant(c).
std::vector<TracePoint> density_trace(const Carrier& c, double x, std::span<const double> t_grid,
                                      bool normalized);

/// Throws ValidationError unless the grid is strictly increasing and positive.
void validate_time_grid(std::span<const double> t_grid);

}  // namespace dit
