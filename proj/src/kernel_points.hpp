#pragma once

// Per-point bodies shared by the serial and OpenMP kernels.

#include <exception>
#include <limits>

#include "dit/kernels.hpp"

namespace dit::detail {

inline TracePoint trace_point(const Carrier& c, double x, double t, double scale) {
  const WaveSample s = sample(c, make_point(c, x, t));
  return {t, s.density * scale, s.flux * scale};
}

inline TraceRow trace_row(const Carrier& c, double x, double t, double scale) {
  const SpacetimePoint p = make_point(c, x, t);
  const WaveSample s = sample(c, p);
  TraceRow r;
  r.t = t;
  r.density_exact = s.density * scale;
  r.flux = s.flux * scale;
  if (saddle_near_singular(c, p)) {
    // Only reachable for k0I = 0, where tau is real and psi_s has a true pole.
    r.near_singular = true;
    r.pole_active = pole_term(c, p).active;
    r.pole_sq = std::norm(pole_term(c, p).value) * scale;
    r.density_approx = r.saddle_sq = r.interference = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const Decomposition d = approx_density(c, p);
  r.density_approx = d.approx_density * scale;
  r.saddle_sq = std::norm(d.saddle) * scale;
  r.pole_sq = std::norm(d.pole) * scale;
  r.interference = d.interference * scale;
  r.pole_active = d.pole_active;
  r.near_singular = d.near_singular;
  return r;
}

inline VisibilityPoint visibility_point(const VisibilityTask& task, ExtremaOptions opts) {
  try {
    return visibility(make_carrier(task.k0I), task.x, task.norm, opts);
  } catch (const std::exception& e) {
    VisibilityPoint p;
    p.k0I = task.k0I;
    p.x = task.x;
    p.error = e.what();
    return p;
  }
}

}  // namespace dit::detail
