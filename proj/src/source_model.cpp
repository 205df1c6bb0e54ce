#include "dit/source_model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dit/faddeeva.hpp"
#include "dit/kernels.hpp"

namespace dit {

namespace {

constexpr Complex kOnePlusI{1.0, 1.0};

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// exp(-i omega0 t + i k0 x), the pole wave.
Complex pole_wave(const Carrier& c, double x, double t) {
  const double re = c.omega0I() * t - c.k0I * x;
  const double im = x - c.omega0R() * t;
  return std::exp(Complex{re, im});
}

}  // namespace

NormalizationDivergence::NormalizationDivergence()
    : ValidationError(
          "normalization diverges for k0I = 0: a non-decaying source emits forever; "
          "use unnormalized densities") {}

double Carrier::period() const noexcept { return 2.0 * std::numbers::pi / omega0R(); }

Carrier make_carrier(double k0I) {
  if (!std::isfinite(k0I) || k0I > 0.0 || k0I <= -1.0) {
    throw ValidationError("k0I must satisfy -1 < k0I <= 0, got " + std::to_string(k0I));
  }
  Carrier c;
  c.k0I = k0I;
  c.k0 = {1.0, k0I};
  c.omega0 = {1.0 - k0I * k0I, 2.0 * k0I};
  c.tau0 = k0I == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (4.0 * std::abs(k0I));
  return c;
}

SpacetimePoint make_point(const Carrier& c, double x, double t) {
  if (!std::isfinite(x) || x < 0.0) throw ValidationError("position x must be finite and >= 0");
  if (!std::isfinite(t) || t <= 0.0) throw ValidationError("time t must be finite and > 0");
  SpacetimePoint p;
  p.x = x;
  p.t = t;
  p.ks = x / (2.0 * t);
  p.vs = x / t;
  p.tau = x / (2.0 * c.k0);
  const double s = std::sqrt(0.5 * t);
  // k0 (1 -+ tau/t) = k0 -+ ks
  p.u0p = kOnePlusI * s * (c.k0 - p.ks);
  p.u0m = -kOnePlusI * s * (c.k0 + p.ks);
  return p;
}

WaveSample sample(const Carrier& c, const SpacetimePoint& p) {
  const Complex half_e = 0.5 * std::exp(Complex{0.0, 0.5 * p.ks * p.x});
  const Complex du = kOnePlusI * std::sqrt(0.5 * p.t) / (2.0 * p.t);  // d(-u0+-)/dx

  WaveSample out;
  const Complex arg_m = -p.u0m;  // always in the upper half-plane
  if ((-p.u0p).imag() >= 0.0) {
    const Complex arg_p = -p.u0p;
    out.psi = half_e * (wofz(arg_p) + wofz(arg_m));
    out.psi_x = Complex{0.0, p.ks} * out.psi + half_e * du * (wofz_deriv(arg_p) + wofz_deriv(arg_m));
  } else {
    // Past the pole crossing: pull 2 exp(-u0+^2) out of w(-u0+) and combine it
    // with the prefactor analytically, which leaves exactly the pole wave.
    const Complex psi0 = pole_wave(c, p.x, p.t);
    const Complex rest = half_e * (wofz(arg_m) - wofz(p.u0p));
    out.psi = psi0 + rest;
    out.psi_x = Complex{0.0, 1.0} * c.k0 * psi0 + Complex{0.0, p.ks} * rest +
                half_e * du * (wofz_deriv(arg_m) + wofz_deriv(p.u0p));
  }
  if (!finite(out.psi) || !finite(out.psi_x)) {
    throw NumericError("wavefunction not representable at x = " + std::to_string(p.x) +
                       ", t = " + std::to_string(p.t));
  }
  out.density = std::norm(out.psi);
  out.flux = 2.0 * (std::conj(out.psi) * out.psi_x).imag();
  return out;
}

Complex psi_exact(const Carrier& c, const SpacetimePoint& p) { return sample(c, p).psi; }

Complex psi_x_exact(const Carrier& c, const SpacetimePoint& p) { return sample(c, p).psi_x; }

WaveSample scaled_sample(double k0R, double k0I, double x, double t) {
  if (!(k0R > 0.0)) throw ValidationError("k0R must be positive");
  const Carrier unit = make_carrier(k0I / k0R);
  WaveSample s = sample(unit, make_point(unit, k0R * x, k0R * k0R * t));
  s.psi_x *= k0R;
  s.flux *= k0R;
  return s;
}

double norm_constant(const Carrier& c) {
  if (c.k0I == 0.0) throw NormalizationDivergence();
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;

  // At x = 0 the wave is exactly the pole wave plus the saddle correction, so
  // J(0, t) = 2 k0R exp(2 omega0I t) + R(t). The first term integrates to
  // 1/|omega0I| in closed form; R oscillates as exp(i omega0R t) t^{-3/2} and
  // is integrated numerically.
  auto ripple = [&c](double t) {
    return sample(c, make_point(c, 0.0, t)).flux - 2.0 * std::exp(2.0 * c.omega0I() * t);
  };

  // R ~ t^{-1/2} at the onset; t = s^2 removes the singularity.
  double r = Quad::integrate(
      [&](double s) { return s > 0.0 ? 2.0 * s * ripple(s * s) : 0.0; }, 0.0, 1.0, 8, 1e-12);

  // Past t_end what is left of the ripple integral is below
  // |R(t_end)| / omega0R ~ 0.4 t_end^{-3/2}. R is smooth on the scale of a
  // period, so one 61-point Kronrod rule per two periods is converged.
  const double t_end = std::min(std::max(50.0 * c.tau0, 100.0), 2.0e4);
  const double panels = std::ceil((t_end - 1.0) / (2.0 * c.period()));
  const double width = (t_end - 1.0) / panels;
  for (double i = 0.0; i < panels; i += 1.0) {
    const double a = 1.0 + i * width;
    r += Quad::integrate(ripple, a, i + 1.0 == panels ? t_end : a + width, 0);
  }

  const double total = 1.0 / std::abs(c.omega0I()) + r;
  if (!std::isfinite(total) || total <= 0.0) {
    throw NumericError("normalization integral did not produce a positive finite value");
  }
  return total;
}

void validate_time_grid(std::span<const double> t_grid) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] <= 0.0) {
      throw ValidationError("time grid entry " + std::to_string(i) + " must be finite and > 0");
    }
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw ValidationError("time grid must be strictly increasing (entry " + std::to_string(i) + ")");
    }
  }
}

std::vector<TracePoint> density_trace(const Carrier& c, double x, std::span<const double> t_grid,
                                      bool normalized) {
  validate_time_grid(t_grid);
  if (!std::isfinite(x) || x < 0.0) throw ValidationError("position x must be finite and >= 0");
  const double scale = normalized ? 1.0 / norm_constant(c) : 1.0;
  return parallel::trace(c, x, t_grid, scale);
}

}  // namespace dit
