#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "dit/faddeeva.hpp"

using dit::Complex;
using dit::wofz;
using dit::wofz_deriv;

namespace {

using BigComplex = boost::multiprecision::cpp_complex_100;
using BigReal = boost::multiprecision::cpp_bin_float_100;

// Maclaurin series w(z) = sum (iz)^n / Gamma(n/2 + 1) in 100-digit arithmetic.
// Terms grow to about exp(|z|^2) before decaying, so this is only used for
// |z| <= 6 where 100 digits leave ample headroom.
Complex wofz_series(Complex z) {
  const BigComplex iz(BigReal(-z.imag()), BigReal(z.real()));
  BigReal g_even = 1;                                                   // Gamma(1)
  BigReal g_odd = boost::multiprecision::sqrt(boost::math::constants::pi<BigReal>()) / 2;  // Gamma(3/2)
  BigComplex power(1);
  BigComplex sum(0);
  const BigReal eps("1e-60");
  for (int n = 0; n < 2000; ++n) {
    const BigReal& g = n % 2 == 0 ? g_even : g_odd;
    const BigComplex term = power / g;
    sum += term;
    if (n > 10 && abs(term) < eps * abs(sum)) break;
    power *= iz;
    // Gamma(n/2 + 2) = (n/2 + 1) Gamma(n/2 + 1)
    (n % 2 == 0 ? g_even : g_odd) *= BigReal(n) / 2 + 1;
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

double rel_err(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(Faddeeva, OriginIsOne) {
  EXPECT_EQ(wofz({0.0, 0.0}), Complex(1.0, 0.0));
  EXPECT_NEAR(wofz_deriv({0.0, 0.0}).imag(), 2.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_EQ(wofz_deriv({0.0, 0.0}).real(), 0.0);
}

TEST(Faddeeva, PinnedValues) {
  // e^4 erfc(2)
  EXPECT_LT(rel_err(wofz({0.0, 2.0}), {0.25539567631050574387, 0.0}), 1e-15);
  EXPECT_LT(rel_err(wofz({1.0, 0.0}), {0.36787944117144232160, 0.60715770584139372912}), 1e-15);
  EXPECT_LT(rel_err(wofz_deriv({1.0, 0.0}), {-0.73575888234288464319, -0.085936244587274884334}), 1e-14);
}

TEST(Faddeeva, SeriesOracleSelfCheck) {
  EXPECT_LT(rel_err(wofz_series({0.0, 2.0}), {0.25539567631050574387, 0.0}), 1e-16);
  EXPECT_LT(rel_err(wofz_series({1.0, 0.0}), {0.36787944117144232160, 0.60715770584139372912}), 1e-16);
}

TEST(Faddeeva, MatchesMultiprecisionSeries) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  double worst = 0.0;
  for (int i = 0; i < 400; ++i) {
    Complex z{u(rng), u(rng)};
    if (std::abs(z) > 6.0) continue;
    worst = std::max(worst, rel_err(wofz(z), wofz_series(z)));
  }
  EXPECT_LT(worst, 1e-13);
}

TEST(Faddeeva, OracleTable) {
  std::ifstream in(DIT_TEST_DATA "/wofz_oracle.txt");
  ASSERT_TRUE(in) << "missing oracle table";
  std::string line;
  int rows = 0;
  int overflow_rows = 0;
  double worst = 0.0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string f[4];
    ASSERT_TRUE(is >> f[0] >> f[1] >> f[2] >> f[3]) << line;
    const Complex z{std::stod(f[0]), std::stod(f[1])};
    const Complex ref{std::strtod(f[2].c_str(), nullptr), std::strtod(f[3].c_str(), nullptr)};
    ++rows;
    if (!std::isfinite(ref.real()) || !std::isfinite(ref.imag())) {
      EXPECT_THROW(wofz(z), dit::FaddeevaOverflow) << line;
      ++overflow_rows;
      continue;
    }
    worst = std::max(worst, rel_err(wofz(z), ref));
  }
  EXPECT_GE(rows, 10000);
  EXPECT_GT(overflow_rows, 0);
  EXPECT_LE(worst, 1e-12);
}

TEST(Faddeeva, ReflectionAndConjugation) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(0.0, 20.0), a(0.0, 2.0 * std::numbers::pi);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const double rho = r(rng), th = a(rng);
    // reflection is checked from the upper half-plane; the other way round
    // 2 exp(-z^2) - w(z) cancels catastrophically
    const Complex z0 = std::polar(rho, th);
    const Complex z = z0.imag() >= 0.0 ? z0 : -z0;
    Complex wz, wm, e;
    try {
      wz = wofz(z);
      wm = wofz(-z);
      e = dit::exp_neg_square(z);
    } catch (const dit::FaddeevaOverflow&) {
      continue;
    }
    ++checked;
    EXPECT_LE(std::abs(wm - (2.0 * e - wz)), 1e-12 * std::abs(wm) + 1e-300) << z;
    const Complex wc = wofz(std::conj(-z));
    EXPECT_LE(std::abs(wc - std::conj(wz)), 1e-12 * std::abs(wz)) << z;
  }
  EXPECT_GT(checked, 5000);
}

TEST(Faddeeva, BoundedInUpperHalfPlane) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x(-50.0, 50.0), y(0.0, 50.0);
  for (int i = 0; i < 10000; ++i) {
    const Complex z{x(rng), y(rng)};
    EXPECT_LE(std::abs(wofz(z)), 1.0 + 1e-15) << z;
  }
  EXPECT_LE(std::abs(wofz({1e-3, 0.0})), 1.0);
}

TEST(Faddeeva, DerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(-20.0, 20.0), y(-5.0, 20.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Complex z{x(rng), y(rng)};
    const double h = 1e-3 / std::max(1.0, std::abs(z));
    const Complex fd = (-wofz(z + 2.0 * h) + 8.0 * wofz(z + h) - 8.0 * wofz(z - h) + wofz(z - 2.0 * h)) / (12.0 * h);
    const Complex d = wofz_deriv(z);
    // Absolute floor: the difference quotient itself carries ~eps |w| / h.
    const double scale = std::max(std::abs(d), std::abs(wofz(z)));
    worst = std::max(worst, std::abs(fd - d) / scale);
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Faddeeva, DerivativeIdentity) {
  for (Complex z : {Complex{0.3, 0.2}, Complex{3.0, 1.0}, Complex{-9.0, 0.5}, Complex{2.0, -1.5}, Complex{30.0, 4.0}}) {
    const Complex want = -2.0 * z * wofz(z) + Complex{0.0, 2.0 / std::sqrt(std::numbers::pi)};
    EXPECT_LT(std::abs(wofz_deriv(z) - want), 1e-13 * std::max(1.0, std::abs(want))) << z;
  }
}

TEST(Faddeeva, OverflowIsReported) {
  try {
    wofz({0.0, -30.0});
    FAIL() << "expected overflow";
  } catch (const dit::FaddeevaOverflow& e) {
    EXPECT_EQ(e.argument(), Complex(0.0, -30.0));
  }
  EXPECT_THROW(wofz_deriv({1.0, -40.0}), dit::FaddeevaOverflow);
  EXPECT_THROW(dit::exp_neg_square({0.0, 27.0}), dit::FaddeevaOverflow);
  // Large but representable: e^{700}
  EXPECT_TRUE(std::isfinite(std::abs(wofz({0.0, -std::sqrt(700.0)}))));
}

TEST(Faddeeva, NonFiniteArgumentRejected) {
  EXPECT_THROW(wofz({std::nan(""), 0.0}), dit::ValidationError);
  EXPECT_THROW(wofz({0.0, INFINITY}), dit::ValidationError);
}
