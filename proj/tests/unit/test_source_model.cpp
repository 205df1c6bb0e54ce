#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dit/kernels.hpp"
#include "dit/source_model.hpp"

using namespace dit;

namespace {

constexpr double kPi = std::numbers::pi;

Complex psi_at(const Carrier& c, double x, double t) { return psi_exact(c, make_point(c, x, t)); }

// 8th-order central first derivative.
template <class F>
auto d1(F f, double x, double h) {
  return (4.0 / 5.0 * (f(x + h) - f(x - h)) - 1.0 / 5.0 * (f(x + 2 * h) - f(x - 2 * h)) +
          4.0 / 105.0 * (f(x + 3 * h) - f(x - 3 * h)) - 1.0 / 280.0 * (f(x + 4 * h) - f(x - 4 * h))) /
         h;
}

std::vector<double> range(double a, double b, double step) {
  std::vector<double> v;
  for (double t = a; t <= b + 1e-9; t += step) v.push_back(t);
  return v;
}

}  // namespace

TEST(Carrier, MoshinskyLimit) {
  const Carrier c = make_carrier(0.0);
  EXPECT_EQ(c.omega0, Complex(1.0, 0.0));
  EXPECT_TRUE(std::isinf(c.tau0));
}

TEST(Carrier, DerivedConstants) {
  const Carrier c = make_carrier(-0.0015);
  EXPECT_DOUBLE_EQ(c.omega0R(), 0.99999775);
  EXPECT_DOUBLE_EQ(c.omega0I(), -0.003);
  EXPECT_NEAR(c.tau0, 500.0 / 3.0, 1e-12);
  EXPECT_NEAR(make_carrier(-0.03).tau0, 25.0 / 3.0, 1e-13);
  EXPECT_LT(std::abs(c.k0 * c.k0 - c.omega0), 1e-16);
  EXPECT_NEAR(c.period(), 2.0 * kPi / 0.99999775, 1e-14);
}

TEST(Carrier, RejectsOutOfRange) {
  EXPECT_THROW(make_carrier(-1.0), ValidationError);
  EXPECT_THROW(make_carrier(0.01), ValidationError);
  EXPECT_THROW(make_carrier(std::nan("")), ValidationError);
  EXPECT_NO_THROW(make_carrier(-0.999));
}

TEST(SpacetimePoint, Kinematics) {
  const Carrier c = make_carrier(-0.03);
  const auto p = make_point(c, 60.0, 40.0);
  EXPECT_EQ(p.vs, 60.0 / 40.0);
  EXPECT_EQ(p.ks, 60.0 / 80.0);
  EXPECT_LT(std::abs(p.tau - 60.0 / (2.0 * c.k0)), 1e-14);
  const Complex expect_p = Complex{1.0, 1.0} * std::sqrt(20.0) * c.k0 * (1.0 - p.tau / 40.0);
  EXPECT_LT(std::abs(p.u0p - expect_p), 1e-13);
  const auto o = make_point(c, 0.0, 3.0);
  EXPECT_EQ(o.tau, Complex(0.0, 0.0));
  EXPECT_EQ(o.u0m, -o.u0p);
  EXPECT_THROW(make_point(c, -1.0, 1.0), ValidationError);
  EXPECT_THROW(make_point(c, 1.0, 0.0), ValidationError);
}

TEST(SourceModel, BoundaryCondition) {
  for (double k0I : {0.0, -0.0015, -0.03, -0.13, -0.5}) {
    const Carrier c = make_carrier(k0I);
    for (double t = 0.1; t <= 100.0; t += 0.37) {
      const Complex want = std::exp(Complex{0.0, -1.0} * c.omega0 * t);
      EXPECT_LE(std::abs(psi_at(c, 0.0, t) - want), 1e-12) << k0I << " " << t;
    }
    const Complex want3 = std::exp(Complex{0.0, -3.0} * c.omega0);
    EXPECT_LE(std::abs(psi_at(c, 0.0, 3.0) - want3), 1e-14);
  }
}

TEST(SourceModel, MatchesMultiprecisionValues) {
  // mpmath, 40 digits, same closed form
  struct Case {
    double k0I, x, t;
    Complex psi;
  };
  const Case cases[] = {
      {-0.0015, 1000.0, 550.0, {-0.50948534290457281634, -0.62397806995850536696}},
      {-0.0015, 1000.0, 535.0, {1.0660898456307067559, 0.010902102383234147523}},
      {-0.03, 60.0, 40.0, {0.25537223258499619793, 0.64720228184215000213}},
      {0.0, 1000.0, 600.0, {-0.46788091598705981478, -0.87603740882503789703}},
  };
  for (const auto& k : cases) {
    const Complex got = psi_at(make_carrier(k.k0I), k.x, k.t);
    EXPECT_LT(std::abs(got - k.psi) / std::abs(k.psi), 1e-12) << k.x << " " << k.t;
  }
  EXPECT_NEAR(std::norm(psi_at(make_carrier(-0.0015), 1000.0, 550.0)), 0.64892394642373156413, 1e-12);
}

TEST(SourceModel, ForerunnerRegionIsNearlyEmpty) {
  const Carrier c = make_carrier(-0.0015);
  for (double t : {0.1, 0.5}) EXPECT_LT(std::norm(psi_at(c, 1000.0, t)), 1e-6) << t;
  // mpmath, 40 digits; far ahead of both fronts the density grows like 4t/(pi x^2)
  const std::pair<double, double> cases[] = {{1.0, 1.27325e-6}, {10.0, 1.27426e-5}, {30.0, 3.84737e-5}};
  for (auto [t, want] : cases) {
    EXPECT_NEAR(std::norm(psi_at(c, 1000.0, t)) / want, 1.0, 1e-5) << t;
  }
}

TEST(SourceModel, OutgoingFluxAtSource) {
  for (double k0I : {0.0, -0.0015, -0.03}) {
    const Carrier c = make_carrier(k0I);
    EXPECT_GT(sample(c, make_point(c, 0.0, 5.0)).flux, 0.0) << k0I;
  }
}

TEST(SourceModel, PlaneWaveLimitFlux) {
  const Carrier c = make_carrier(0.0);
  const auto s = sample(c, make_point(c, 10.0, 2.0e4));
  EXPECT_NEAR(s.flux / s.density, 2.0, 1e-2);
}

TEST(SourceModel, SpatialDerivativeMatchesFiniteDifferences) {
  for (double k0I : {0.0, -0.0015, -0.03, -0.13}) {
    const Carrier c = make_carrier(k0I);
    for (double x : {0.5, 10.0, 60.0, 300.0, 1000.0}) {
      for (double t : {5.0, 40.0, 200.0, 520.0, 800.0, 1500.0}) {
        const double h = 2.0 * kPi / (50.0 * std::max(1.0, x / (2.0 * t)));
        const auto s = sample(c, make_point(c, x, t));
        if (s.density <= 1e-12 || x < 4.0 * h) continue;
        const Complex fd = d1([&](double xx) { return psi_at(c, xx, t); }, x, h);
        EXPECT_LE(std::abs(fd - s.psi_x), 1e-7 * std::max(std::abs(s.psi_x), std::abs(s.psi))) << x << " " << t;
      }
    }
  }
}

// Continuity and Schroedinger residuals near x = 1000.
TEST(SourceModel, ContinuityAndSchroedingerResiduals) {
  const Carrier c = make_carrier(-0.0015);
  double max_rho_t = 0.0, max_cont = 0.0, max_psi_t = 0.0, max_schr = 0.0;
  for (double x : {995.0, 1000.0, 1005.0}) {
    for (double t = 100.0; t <= 1200.0; t += 3.7) {
      auto rho = [&](double tt) { return sample(c, make_point(c, x, tt)).density; };
      auto flux = [&](double xx) { return sample(c, make_point(c, xx, t)).flux; };
      auto psi_t = [&](double tt) { return psi_at(c, x, tt); };
      auto psi_x = [&](double xx) { return psi_x_exact(c, make_point(c, xx, t)); };
      // steps resolve the local carrier: wavenumber max(1, ks), frequency max(omega0R, ks^2)
      const double ks = x / (2.0 * t);
      const double hx = 2.0 * kPi / (50.0 * std::max(1.0, ks));
      const double ht = 2.0 * kPi / (50.0 * std::max(c.omega0R(), ks * ks));
      const double rt = d1(rho, t, ht);
      const Complex pt = d1(psi_t, t, ht);
      const Complex pxx = d1(psi_x, x, hx);
      max_rho_t = std::max(max_rho_t, std::abs(rt));
      max_cont = std::max(max_cont, std::abs(rt + d1(flux, x, hx)));
      max_psi_t = std::max(max_psi_t, std::abs(pt));
      max_schr = std::max(max_schr, std::abs(Complex{0.0, 1.0} * pt + pxx));
    }
  }
  EXPECT_LE(max_cont, 1e-6 * max_rho_t);
  EXPECT_LE(max_schr, 1e-5 * max_psi_t);
}

TEST(SourceModel, ScaledCarrier) {
  // k0R = 1 is the identity
  const Carrier c = make_carrier(-0.03);
  const auto a = sample(c, make_point(c, 60.0, 40.0));
  const auto b = scaled_sample(1.0, -0.03, 60.0, 40.0);
  EXPECT_EQ(a.psi, b.psi);
  // boundary value exp(-i k0^2 t) for a general carrier
  const Complex k0{0.7, -0.02};
  for (double t : {0.5, 3.0, 30.0}) {
    const auto s = scaled_sample(k0.real(), k0.imag(), 0.0, t);
    EXPECT_LT(std::abs(s.psi - std::exp(Complex{0.0, -1.0} * k0 * k0 * t)), 1e-12);
  }
  // Plane-wave limit J = 2 k0R rho
  const auto s = scaled_sample(0.7, 0.0, 10.0, 4.0e4);
  EXPECT_NEAR(s.flux / s.density, 1.4, 1e-2);
  EXPECT_THROW(scaled_sample(0.0, 0.0, 1.0, 1.0), ValidationError);
}

// Parseval on the boundary signal exp(-i omega0 t) Theta(t) together with the
// residue of the outgoing-branch dispersion integral gives the emitted
// probability in closed form: int J(0, t) dt = 1 / (2 |k0I|).
TEST(Normalization, ClosedForm) {
  for (double k0I : {-0.5, -0.13, -0.03, -0.003, -0.0015, -1e-5}) {
    const double n = norm_constant(make_carrier(k0I));
    EXPECT_NEAR(n * 2.0 * std::abs(k0I), 1.0, 1e-10) << k0I;
  }
}

TEST(Normalization, MonotoneInLifetime) {
  EXPECT_LT(norm_constant(make_carrier(-0.003)), norm_constant(make_carrier(-0.0015)));
  EXPECT_LT(norm_constant(make_carrier(-0.13)), norm_constant(make_carrier(-0.03)));
}

TEST(Normalization, DivergesForMoshinsky) {
  EXPECT_THROW(norm_constant(make_carrier(0.0)), NormalizationDivergence);
  EXPECT_THROW(norm_constant(make_carrier(0.0)), ValidationError);
}

TEST(DensityTrace, EmptyGrid) {
  EXPECT_TRUE(density_trace(make_carrier(-0.0015), 1000.0, {}, true).empty());
}

TEST(DensityTrace, RejectsBadGrid) {
  const Carrier c = make_carrier(-0.0015);
  const std::vector<double> dup{1.0, 2.0, 2.0};
  const std::vector<double> neg{-1.0, 2.0};
  EXPECT_THROW(density_trace(c, 10.0, dup, false), ValidationError);
  EXPECT_THROW(density_trace(c, 10.0, neg, false), ValidationError);
  EXPECT_THROW(density_trace(c, -1.0, std::vector<double>{1.0}, false), ValidationError);
  EXPECT_THROW(density_trace(make_carrier(0.0), 10.0, std::vector<double>{1.0}, true), NormalizationDivergence);
}

TEST(DensityTrace, NormalizedIsScaled) {
  const Carrier c = make_carrier(-0.03);
  const auto t = range(10.0, 100.0, 1.0);
  const auto raw = density_trace(c, 60.0, t, false);
  const auto nrm = density_trace(c, 60.0, t, true);
  const double n = norm_constant(c);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_DOUBLE_EQ(nrm[i].density, raw[i].density / n);
    EXPECT_DOUBLE_EQ(nrm[i].flux, raw[i].flux / n);
  }
}

TEST(DensityTrace, PrincipalPeakNearOnset) {
  const Carrier c = make_carrier(-0.0015);
  const auto t = range(100.0, 1200.0, 0.2);
  const auto tr = density_trace(c, 1000.0, t, true);
  const auto it = std::max_element(tr.begin(), tr.end(), [](auto& a, auto& b) { return a.density < b.density; });
  EXPECT_NEAR(it->t, 535.0, 10.0);
  // decaying oscillations after the peak: more than ten further local maxima
  int maxima = 0;
  for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
    if (tr[i].t > it->t && tr[i].density > tr[i - 1].density && tr[i].density > tr[i + 1].density) ++maxima;
  }
  EXPECT_GT(maxima, 10);
}

TEST(DensityTrace, MoshinskyApproachesPlaneWave) {
  const Carrier c = make_carrier(0.0);
  const auto tr = density_trace(c, 1000.0, std::vector<double>{2.0e4}, false);
  EXPECT_NEAR(tr[0].density, 1.0, 0.05);
}

TEST(DensityTrace, ContinuousInK0I) {
  const auto t = range(400.0, 700.0, 0.5);
  const auto a = density_trace(make_carrier(0.0), 1000.0, t, false);
  const auto b = density_trace(make_carrier(-1e-6), 1000.0, t, false);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_LE(std::abs(a[i].density - b[i].density), 0.01 * a[i].density) << t[i];
  }
}

TEST(DensityTrace, SerialAndParallelAgreeBitwise) {
  const Carrier c = make_carrier(-0.0015);
  const auto t = range(100.0, 1200.0, 0.7);
  const auto s = serial::trace(c, 1000.0, t, 0.5);
  for (int threads : {1, 2, 4}) {
    set_max_threads(threads);
    const auto p = parallel::trace(c, 1000.0, t, 0.5);
    ASSERT_EQ(s.size(), p.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(s[i].density, p[i].density);
      EXPECT_EQ(s[i].flux, p[i].flux);
    }
  }
  set_max_threads(0);
}
