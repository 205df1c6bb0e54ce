#pragma once

// Winter's decay model: a particle starts in the ground state of the box
// [-L, 0]; at t = 0 the right wall becomes a barrier U delta(x) and the
// state leaks out. The wave at a distant point is compared with the point
// source model.
//
// Numerics: H = -d^2/dx^2 + U delta(x) on a uniform grid over [-L, X_max],
// hard wall at -L, delta as a single-site potential U/dx. Crank-Nicolson
// steps are exactly norm preserving for the Hermitian part; outgoing waves
// are removed by a quadratic absorbing potential -iW(x) beyond
// x_obs + margin, and the probability it takes out is accumulated from the
// discrete balance |psi'|^2 - |psi|^2 = -2 dt <chi|W|chi>, chi = (psi'+psi)/2.

#include <vector>

#include "dit/dit_analysis.hpp"
#include "dit/error.hpp"

namespace dit {

enum class WallKind { Infinite, Finite };

struct WinterConfig {
  double L = 3.14;
  double U = 161.35;
  WallKind wall = WallKind::Infinite;
  double V = 202.72;  ///< right-wall height of the finite-wall initial well
  double x_obs = 157.05;
  double dx = 3.14 / 200.0;  ///< must divide L
  double dt = 0.005;
  double t_max = 300.0;
  double margin = 40.0;           ///< x_obs to absorber start
  double absorber_width = 200.0;
  double absorber_strength = 5.0;
  double record_interval = 0.05;

  double x_max() const noexcept { return x_obs + margin + absorber_width; }
  /// Same physics with dx and dt divided by `factor`.
  WinterConfig refined(int factor) const;
};

/// Throws ValidationError naming the first offending field.
void validate(const WinterConfig& cfg);

struct Grid {
  double x_min = 0.0;
  double dx = 0.0;
  std::size_t size = 0;    ///< includes both Dirichlet end points
  std::size_t origin = 0;  ///< index of x = 0

  double x(std::size_t j) const noexcept { return x_min + static_cast<double>(j) * dx; }
};

Grid make_grid(const WinterConfig& cfg);

struct GridState {
  Grid grid;
  std::vector<Complex> psi;
  double time = 0.0;

  double norm() const;
};

/// sqrt(2/L) sin(pi (x + L)/L) on [-L, 0], zero outside, normalized on the grid.
/// Rejects grids with fewer than 20 points across the well.
GridState initial_state_infinite(double L, const Grid& grid);

/// Ground-state wavenumber of the well with a hard wall at -L and a step of
/// height V for x > 0: k cot(kL) = -sqrt(V - k^2).
double finite_well_wavenumber(double L, double V);

/// Ground state of that well: sin(k(x+L)) inside, sin(kL) exp(-kappa x) outside.
GridState initial_state_finite(double L, double V, const Grid& grid);

GridState initial_state(const WinterConfig& cfg, const Grid& grid);

struct WinterTrace {
  std::vector<double> t;
  std::vector<double> density;
  std::vector<double> flux;
  double x_obs = 0.0;
  double norm_initial = 0.0;
  double norm_final = 0.0;
  double absorbed = 0.0;
  double max_norm_drift = 0.0;  ///< max |N(t) + absorbed(t) - N(0)| / N(0)
  double probe_x = 0.0;       ///< absorber entrance
  double leak_x = 0.0;        ///< 90% of the way through the absorber
  double leak = 0.0;          ///< max density at leak_x over max density at probe_x
  bool contaminated = false;  ///< leak above 1e-4: an end-wall echo (~leak^2) may reach 1e-8 of the trace
};

/// Propagates `state` to cfg.t_max and records density and flux at x_obs
/// (cubic interpolation between grid points). Throws NumericError if the
/// norm balance drifts by more than 1e-6.
WinterTrace propagate(GridState state, const WinterConfig& cfg);

/// Convenience: initial state from cfg.wall, then propagate.
WinterTrace run_winter(const WinterConfig& cfg);

struct SourceFit {
  double k0R = 1.0;
  double k0I = 0.0;
  double scale = 0.0;     ///< amplitude multiplying the source-model density
  double residual = 0.0;  ///< RMS of rho_winter / rho_fit - 1 over the window
  std::size_t samples = 0;
};

/// Fits the source model to `trace` inside `window`: k0R from the mean of
/// J/(2 rho), k0I from the log-density slope 2 omega0I, then both refined by
/// golden-section sweeps on the squared log residual with the amplitude
/// profiled out. Throws ConvergenceError when the window is too short.
SourceFit fit_source_model(const WinterTrace& trace, TimeWindow window);

/// Source-model density at the trace's x_obs for a fitted carrier.
std::vector<double> source_overlay(const SourceFit& fit, double x_obs, std::span<const double> t);

/// Window after the main front, [0.75 x_obs, t_end].
TimeWindow resonance_window(double x_obs, double t_end);

/// From the free arrival of the carrier, [0.5 x_obs, t_end]; holds the
/// principal maximum and the DIT oscillations after it.
TimeWindow front_window(double x_obs, double t_end);

/// Gaussian smoothing of a uniformly sampled trace (kernel cut at 4 sigma,
/// renormalized near the ends). The Winter trace carries a small beat with
/// the second box resonance at omega ~ 3; sigma = 1 removes it while leaving
/// the DIT oscillations (omega < 1) nearly intact.
std::vector<double> smooth_trace(std::span<const double> t, std::span<const double> y, double sigma);

/// Maxima of a sampled trace inside `window`, starting from the principal
/// (largest) one; earlier maxima are forerunner or noise.
std::vector<Extremum> trace_maxima(std::span<const double> t, std::span<const double> y, TimeWindow window);

/// Visibility of a sampled trace: the maximum after the principal one minus
/// the lowest sample between them. Zero with fewer than two maxima.
VisibilityPoint trace_visibility(std::span<const double> t, std::span<const double> y, TimeWindow window);

}  // namespace dit
