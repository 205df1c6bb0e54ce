#include "dit/decomposition.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dit {

double pole_onset_time(const Carrier& c, double x) { return x / (2.0 * (1.0 + c.k0I)); }

Complex saddle_term(const Carrier& c, const SpacetimePoint& p) {
  if (p.x == 0.0) return {0.0, 0.0};
  const Complex phase = std::exp(Complex{0.0, 0.5 * p.ks * p.x});
  const Complex den = Complex{-1.0, 1.0} * c.k0 * (p.t * p.t - p.tau * p.tau);
  const Complex value = std::sqrt(2.0 * p.t / std::numbers::pi) * p.tau * phase / den;
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw NumericError("saddle term singular at t = |tau| (x = " + std::to_string(p.x) +
                       ", t = " + std::to_string(p.t) + ")");
  }
  return value;
}

bool saddle_near_singular(const Carrier&, const SpacetimePoint& p) {
  return std::abs(p.t * p.t - p.tau * p.tau) < 1e-9 * p.t * p.t;
}

PoleTerm pole_term(const Carrier& c, const SpacetimePoint& p) {
  PoleTerm out;
  out.value = std::exp(Complex{c.omega0I() * p.t - c.k0I * p.x, p.x - c.omega0R() * p.t});
  out.active = p.u0p.imag() >= 0.0;
  return out;
}

InterferenceFactors interference_factors(const Carrier& c, const SpacetimePoint& p) {
  return {(c.omega0R() + p.ks * p.ks) * p.t - p.x - 0.75 * std::numbers::pi,
          std::exp(c.omega0I() * p.t - c.k0I * p.x)};
}

double interference_product(const Carrier& c, const SpacetimePoint& p) {
  return 2.0 * (saddle_term(c, p) * std::conj(pole_term(c, p).value)).real();
}

double interference_term(const Carrier& c, const SpacetimePoint& p) {
  const auto [phi, beta] = interference_factors(c, p);
  const double x = p.x;
  const double t = p.t;
  const double t2 = t * t;
  const double x2 = x * x;
  const double w0R = c.omega0R();
  const double w0I = c.omega0I();
  // 16|w0|^2 t^4 + x^4 - 8 t^2 x^2 w0R, regrouped so it does not cancel near t = |tau|.
  const double gap = 4.0 * w0R * t2 - x2;
  const double den = gap * gap + 16.0 * w0I * w0I * t2 * t2;
  const double bracket = 2.0 * x * gap * std::cos(phi) + 8.0 * w0I * x * t2 * std::sin(phi);
  const double value = std::sqrt(t / std::numbers::pi) * 2.0 * (bracket / den) * beta;

  const Complex s = saddle_term(c, p);
  const Complex q = pole_term(c, p).value;
  const double product = 2.0 * (s * std::conj(q)).real();
  const double scale = 2.0 * std::abs(s) * std::abs(q);
  if (std::abs(value - product) > 1e-10 * scale) {
    throw NumericError("interference cross-check failed at x = " + std::to_string(x) +
                       ", t = " + std::to_string(t));
  }
  return value;
}

Decomposition approx_density(const Carrier& c, const SpacetimePoint& p) {
  Decomposition d;
  d.near_singular = saddle_near_singular(c, p);
  d.saddle = saddle_term(c, p);
  const PoleTerm pole = pole_term(c, p);
  d.pole = pole.value;
  d.pole_active = pole.active;
  d.interference = pole.active ? interference_term(c, p) : 0.0;
  d.approx_density = std::norm(d.saddle) + (pole.active ? std::norm(d.pole) + d.interference : 0.0);
  return d;
}

}  // namespace dit
