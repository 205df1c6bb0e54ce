#pragma once

// Saddle + pole approximation of the exact wavefunction. The saddle term is
// the burst released at t = 0 with every velocity; the pole term is the
// decaying carrier wave, switched on once the steepest-descent path crosses
// the pole at t_c = x / [2(1 + k0I)]. Neither oscillates in time on its own;
// the oscillation lives entirely in their interference.

#include "dit/source_model.hpp"

namespace dit {

struct InterferenceFactors {
  double phi = 0.0;   ///< (omega0R + ks^2) t - x - 3pi/4
  double beta = 0.0;  ///< exp(omega0I t - k0I x)
};

struct PoleTerm {
  Complex value;
  bool active = false;  ///< Im(u0+) >= 0, i.e. t >= t_c
};

struct Decomposition {
  Complex saddle;
  Complex pole;
  bool pole_active = false;
  double interference = 0.0;  ///< 2 Re[psi_s conj(psi_0)], zero while the pole is inactive
  double approx_density = 0.0;
  bool near_singular = false;  ///< |t^2 - tau^2| < 1e-9 t^2
};

/// Onset of the pole contribution at position x.
double pole_onset_time(const Carrier& c, double x);

Complex saddle_term(const Carrier& c, const SpacetimePoint& p);
bool saddle_near_singular(const Carrier& c, const SpacetimePoint& p);
PoleTerm pole_term(const Carrier& c, const SpacetimePoint& p);
InterferenceFactors interference_factors(const Carrier& c, const SpacetimePoint& p);

/// Interference 2 Re[psi_s conj(psi_0)] from the explicit real form in
/// (phi, beta), cross-checked against the complex product. Not gated by
/// the pole onset. Throws NumericError if the two routes disagree by more
/// than 1e-10 of 2|psi_s||psi_0|.
double interference_term(const Carrier& c, const SpacetimePoint& p);

/// Same quantity directly from the complex product.
double interference_product(const Carrier& c, const SpacetimePoint& p);

/// Assembles |psi_s|^2 + Theta (|psi_0|^2 + interference).
Decomposition approx_density(const Carrier& c, const SpacetimePoint& p);

}  // namespace dit
