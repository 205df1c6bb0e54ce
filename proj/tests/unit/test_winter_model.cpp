#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dit/source_model.hpp"
#include "dit/winter_model.hpp"

using namespace dit;

namespace {

constexpr double kL = 3.14;

WinterConfig coarse(double t_max) {
  WinterConfig c;
  c.dx = kL / 100.0;
  c.dt = 0.01;
  c.t_max = t_max;
  return c;
}

// Bisection in long double on k cos(kL) + kappa sin(kL) = 0, (pi/2L, pi/L).
long double well_oracle(long double L, long double V) {
  const long double pi = std::numbers::pi_v<long double>;
  auto g = [&](long double k) { return k * std::cos(k * L) + std::sqrt(V - k * k) * std::sin(k * L); };
  long double a = 0.5L * pi / L;
  long double b = std::min(pi / L, std::sqrt(V));
  for (int i = 0; i < 200; ++i) {
    const long double m = 0.5L * (a + b);
    (g(m) > 0 ? a : b) = m;
  }
  return 0.5L * (a + b);
}

double overlap(const GridState& a, const GridState& b) {
  Complex s{0.0, 0.0};
  for (std::size_t j = 0; j < a.psi.size(); ++j) s += std::conj(a.psi[j]) * b.psi[j];
  return std::abs(s) * a.grid.dx;
}

}  // namespace

TEST(WinterInitialState, InfiniteWell) {
  WinterConfig cfg;
  const Grid g = make_grid(cfg);
  const auto s = initial_state_infinite(kL, g);
  EXPECT_NEAR(s.norm(), 1.0, 1e-12);
  EXPECT_EQ(s.psi[0], Complex(0.0, 0.0));
  EXPECT_EQ(s.psi[g.origin], Complex(0.0, 0.0));
  EXPECT_NEAR(s.psi[g.origin / 2].real(), std::sqrt(2.0 / kL), 1e-12);
  for (std::size_t j = g.origin; j < g.size; ++j) ASSERT_EQ(s.psi[j], Complex(0.0, 0.0));
}

TEST(WinterInitialState, CoarseGridRejected) {
  WinterConfig cfg;
  cfg.dx = kL / 10.0;
  EXPECT_THROW(initial_state_infinite(kL, make_grid(cfg)), ValidationError);
}

TEST(WinterInitialState, FiniteWellWavenumber) {
  for (double V : {20.0, 202.72, 1e4}) {
    const double k = finite_well_wavenumber(kL, V);
    EXPECT_NEAR(k, static_cast<double>(well_oracle(kL, V)), 1e-12 * k) << V;
  }
  EXPECT_THROW(finite_well_wavenumber(kL, 0.1), ValidationError);
  EXPECT_THROW(finite_well_wavenumber(-1.0, 10.0), ValidationError);
}

TEST(WinterInitialState, DeepFiniteWellApproachesBox) {
  WinterConfig cfg;
  const Grid g = make_grid(cfg);
  EXPECT_GE(overlap(initial_state_infinite(kL, g), initial_state_finite(kL, 1e6, g)), 0.999);
}

TEST(WinterInitialState, FiniteWellTail) {
  WinterConfig cfg;
  const Grid g = make_grid(cfg);
  const auto s = initial_state_finite(kL, 202.72, g);
  EXPECT_NEAR(s.norm(), 1.0, 1e-12);
  EXPECT_GT(s.psi[g.origin].real(), 0.0);
  for (std::size_t j = g.origin + 1; j + 1 < g.size && j < g.origin + 200; ++j) {
    ASSERT_LT(std::abs(s.psi[j]), std::abs(s.psi[j - 1]));
  }
}

TEST(WinterConfig, Validation) {
  WinterConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  auto bad = [&](auto mutate) {
    WinterConfig c = cfg;
    mutate(c);
    EXPECT_THROW(validate(c), ValidationError);
  };
  bad([](WinterConfig& c) { c.dx = 0.0; });
  bad([](WinterConfig& c) { c.dx = kL / 200.5; });
  bad([](WinterConfig& c) { c.U = -1.0; });
  bad([](WinterConfig& c) { c.dt = 0.0; });
  bad([](WinterConfig& c) { c.margin = 0.0; });
  bad([](WinterConfig& c) { c.absorber_width = 0.0; });
  bad([](WinterConfig& c) { c.record_interval = c.dt / 2.0; });
  bad([](WinterConfig& c) {
    c.wall = WallKind::Finite;
    c.V = 0.0;
  });
  EXPECT_THROW(cfg.refined(0), ValidationError);
  EXPECT_DOUBLE_EQ(cfg.refined(2).dx, cfg.dx / 2.0);
}

TEST(WinterPropagation, OpaqueBarrierKeepsTraceNearZero) {
  WinterConfig cfg = coarse(100.0);
  cfg.U = 1e4;
  const auto tr = run_winter(cfg);
  EXPECT_LT(*std::max_element(tr.density.begin(), tr.density.end()), 1e-6);
  EXPECT_GT(tr.norm_final, 0.999);
  EXPECT_LT(tr.max_norm_drift, 1e-8);
}

TEST(WinterPropagation, NormBalance) {
  const auto tr = run_winter(coarse(150.0));
  EXPECT_LT(tr.max_norm_drift, 1e-8);
  EXPECT_NEAR(tr.norm_final + tr.absorbed, tr.norm_initial, 1e-8);
  EXPECT_GT(tr.absorbed, 0.0);
  EXPECT_FALSE(tr.contaminated);
  EXPECT_EQ(tr.t.size(), tr.density.size());
  EXPECT_EQ(tr.t.size(), tr.flux.size());
}

TEST(WinterPropagation, ShortLifetimeSuppressesVisibility) {
  // Lower U means a shorter lifetime. Past the optimum lifetime for this x_obs
  // the visibility falls; relative to the principal peak it falls throughout.
  std::vector<double> delta, relative;
  for (double U : {15.0, 4.0, 2.0}) {
    WinterConfig cfg = coarse(200.0);
    cfg.U = U;
    const auto tr = run_winter(cfg);
    const auto smooth = smooth_trace(tr.t, tr.density, 1.0);
    const auto window = front_window(cfg.x_obs, cfg.t_max);
    const auto v = trace_visibility(tr.t, smooth, window);
    ASSERT_GE(v.maxima_found, 2) << U;
    delta.push_back(v.delta);
    relative.push_back(v.delta / trace_maxima(tr.t, smooth, window).front().value);
  }
  EXPECT_LT(delta[2], delta[1]);
  EXPECT_LT(relative[1], relative[0]);
  EXPECT_LT(relative[2], relative[1]);
}

TEST(WinterFit, RecoversSyntheticCarrier) {
  const double k0R = 0.9985;
  const double k0I = -0.002;
  WinterTrace tr;
  tr.x_obs = 157.05;
  for (double t = 120.0; t <= 300.0; t += 0.05) {
    const auto s = scaled_sample(k0R, k0I, tr.x_obs, t);
    tr.t.push_back(t);
    tr.density.push_back(0.7 * s.density);
    tr.flux.push_back(0.7 * s.flux);
  }
  const auto fit = fit_source_model(tr, {120.0, 300.0});
  EXPECT_NEAR(fit.k0I, k0I, 1e-4);
  EXPECT_NEAR(fit.k0R, k0R, 1e-4);
  EXPECT_NEAR(fit.scale, 0.7, 0.7e-3);
  EXPECT_LT(fit.residual, 1e-3);

  const auto overlay = source_overlay(fit, tr.x_obs, tr.t);
  ASSERT_EQ(overlay.size(), tr.t.size());
  for (std::size_t i = 0; i < overlay.size(); i += 97) {
    EXPECT_NEAR(overlay[i] / tr.density[i], 1.0, 1e-3);
  }
  EXPECT_THROW(fit_source_model(tr, {120.0, 121.0}), ConvergenceError);
}

TEST(WinterTraceAnalysis, MaximaStartAtPrincipal) {
  std::vector<double> t, y;
  for (int i = 0; i < 4000; ++i) {
    const double s = 0.01 * i;
    t.push_back(s);
    // small early bump, large principal peak at 10, then decaying ripples
    y.push_back(0.1 * std::exp(-(s - 2) * (s - 2)) + std::exp(-(s - 10) * (s - 10)) +
                (s > 10 ? 0.2 * std::exp(-0.05 * s) * (1 + std::cos(s)) : 0.0));
  }
  const auto m = trace_maxima(t, y, {0.0, 40.0});
  ASSERT_GE(m.size(), 2u);
  EXPECT_NEAR(m[0].t, 10.0, 0.1);
  const auto v = trace_visibility(t, y, {0.0, 40.0});
  EXPECT_GT(v.delta, 0.0);
  EXPECT_GT(v.t_min, v.t_max1);
  EXPECT_LT(v.t_min, v.t_max2);
  const auto smooth = smooth_trace(t, y, 0.05);
  EXPECT_NEAR(smooth[1500], y[1500], 1e-3);
  const std::vector<double> flat(t.size(), 2.5);
  for (double v : smooth_trace(t, flat, 1.0)) ASSERT_NEAR(v, 2.5, 1e-14);
  EXPECT_THROW(smooth_trace(t, y, 0.0), ValidationError);
  std::vector<double> short_y(t.size() - 1);
  EXPECT_THROW(trace_maxima(t, short_y, {0.0, 1.0}), ValidationError);
}
