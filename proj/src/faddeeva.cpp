#include "dit/faddeeva.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dit {

FaddeevaOverflow::FaddeevaOverflow(Complex z)
    : NumericError([&] {
        std::ostringstream os;
        os.precision(17);
        os << "w(z) overflows double range at z = (" << z.real() << ", " << z.imag() << ")";
        return os.str();
      }()),
      z_(z) {}

namespace {

constexpr double kInvSqrtPi = 0.56418958354775628694807945156077259;
constexpr double kCfRadius = 8.0;
constexpr int kCfDepth = 20;
constexpr int kWeidemanTerms = 40;

struct WeidemanTable {
  double L;
  std::array<double, kWeidemanTerms> a;  // a[n] multiplies Z^n
};

WeidemanTable build_weideman() {
  constexpr int N = kWeidemanTerms;
  constexpr int M = 2 * N;
  constexpr int M2 = 2 * M;
  WeidemanTable tab{};
  tab.L = std::sqrt(N / std::numbers::sqrt2);

  // f sampled on the tangent grid, with a leading zero, then rotated by M
  // (an fftshift of the length-2M vector).
  std::array<double, M2> f{};
  for (int k = -M + 1; k <= M - 1; ++k) {
    const double t = tab.L * std::tan(k * std::numbers::pi / (2.0 * M));
    f[static_cast<std::size_t>(k + M)] = std::exp(-t * t) * (tab.L * tab.L + t * t);
  }
  std::array<double, M2> shifted{};
  for (int m = 0; m < M2; ++m) shifted[m] = f[(m + M) % M2];

  for (int j = 1; j <= N; ++j) {
    long double acc = 0.0L;
    for (int m = 0; m < M2; ++m) {
      const long double arg = 2.0L * std::numbers::pi_v<long double> * ((static_cast<long>(j) * m) % M2) / M2;
      acc += shifted[m] * std::cos(arg);
    }
    tab.a[static_cast<std::size_t>(j - 1)] = static_cast<double>(acc / M2);
  }
  return tab;
}

const WeidemanTable& weideman() {
  static const WeidemanTable tab = build_weideman();
  return tab;
}

struct WAndDeriv {
  Complex w;
  Complex dw;
};

// Im z >= 0, Re z >= 0.
WAndDeriv upper_quadrant(Complex z) {
  const Complex i_sqrtpi{0.0, kInvSqrtPi};
  if (std::abs(z) >= kCfRadius) {
    Complex r{0.0, 0.0};
    for (int k = kCfDepth; k >= 1; --k) r = (0.5 * k) / (z - r);
    const Complex inv = 1.0 / (z - r);
    // -2zw + 2i/sqrt(pi) collapses to -2i/sqrt(pi) * r/(z - r).
    return {i_sqrtpi * inv, -2.0 * i_sqrtpi * r * inv};
  }
  const auto& tab = weideman();
  const Complex iz{-z.imag(), z.real()};
  const Complex den = tab.L - iz;
  const Complex Z = (tab.L + iz) / den;
  Complex p = tab.a.back();
  for (auto it = tab.a.rbegin() + 1; it != tab.a.rend(); ++it) p = p * Z + *it;
  const Complex w = 2.0 * p / (den * den) + kInvSqrtPi / den;
  return {w, -2.0 * z * w + 2.0 * i_sqrtpi};
}

WAndDeriv upper_half(Complex z) {
  if (z.real() >= 0.0) return upper_quadrant(z);
  // w(-conj z) = conj w(z)
  const auto m = upper_quadrant({-z.real(), z.imag()});
  return {std::conj(m.w), -std::conj(m.dw)};
}

void require_finite(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw ValidationError("Faddeeva function argument must be finite");
  }
}

}  // namespace

namespace {

// exp(-z^2) = exp(log_mag) * unit with |unit| ~ 1, kept apart so callers can
// scale before leaving the double range.
struct SplitExp {
  double log_mag;
  Complex unit;
};

SplitExp split_exp_neg_square(Complex z) {
  const double x = z.real();
  const double y = z.imag();

  // y^2 - x^2 as an unevaluated sum hi + lo.
  const double xx = x * x;
  const double exx = std::fma(x, x, -xx);
  const double yy = y * y;
  const double eyy = std::fma(y, y, -yy);
  const double hi = yy - xx;
  const double bb = hi - yy;
  const double lo = ((yy - (hi - bb)) + (-xx - bb)) + (eyy - exx);

  // 2xy likewise.
  const double p = 2.0 * x * y;
  const double plo = std::fma(2.0 * x, y, -p);

  const double c = std::cos(p);
  const double s = std::sin(p);
  return {hi, (1.0 + lo) * Complex{c - plo * s, -(s + plo * c)}};
}

double scale_component(double v, double log_mag, Complex z) {
  static const double log_max = std::log(std::numeric_limits<double>::max());
  if (v == 0.0) return 0.0;
  if (log_mag < log_max - 8.0) return v * std::exp(log_mag);
  if (std::log(std::abs(v)) + log_mag > log_max + 1.0) throw FaddeevaOverflow(z);
  // exp(log_mag) itself may overflow while v exp(log_mag) does not.
  constexpr double kE2 = 7.389056098930650227230427460575;
  const double r = v * std::exp(log_mag - 2.0) * kE2;
  if (!std::isfinite(r)) throw FaddeevaOverflow(z);
  return r;
}

// coeff * exp(-z^2), overflow checked per component.
Complex times_exp_neg_square(Complex coeff, Complex z) {
  const SplitExp e = split_exp_neg_square(z);
  const Complex v = coeff * e.unit;
  return {scale_component(v.real(), e.log_mag, z), scale_component(v.imag(), e.log_mag, z)};
}

}  // namespace

Complex exp_neg_square(Complex z) {
  require_finite(z);
  return times_exp_neg_square(1.0, z);
}

Complex wofz(Complex z) {
  require_finite(z);
  if (z.imag() >= 0.0) return upper_half(z).w;
  return times_exp_neg_square(2.0, z) - upper_half(-z).w;
}

Complex wofz_deriv(Complex z) {
  require_finite(z);
  if (z.imag() >= 0.0) return upper_half(z).dw;
  const Complex d = times_exp_neg_square(-4.0 * z, z) + upper_half(-z).dw;
  if (!std::isfinite(d.real()) || !std::isfinite(d.imag())) throw FaddeevaOverflow(z);
  return d;
}

}  // namespace dit
