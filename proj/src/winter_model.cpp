#include "dit/winter_model.hpp"

#include <boost/math/tools/roots.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "dit/source_model.hpp"

namespace dit {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(std::string("winter config: ") + what);
}

void normalize(GridState& s) {
  const double n = s.norm();
  if (!(n > 0.0)) throw NumericError("initial state has zero norm on this grid");
  const double f = 1.0 / std::sqrt(n);
  for (auto& v : s.psi) v *= f;
}

void require_resolved(double L, const Grid& grid) {
  if (L / grid.dx < 20.0) {
    throw ValidationError("grid too coarse: fewer than 20 points across the well");
  }
  if (grid.origin >= grid.size || std::abs(grid.x(grid.origin)) > 1e-9 * L) {
    throw ValidationError("grid must contain x = 0 as a node");
  }
}

// Lagrange weights on nodes -1, 0, 1, 2 at offset s in [0, 1): values and d/ds.
struct Stencil {
  std::size_t first = 0;
  std::array<double, 4> w{};
  std::array<double, 4> dw{};
};

Stencil cubic_stencil(const Grid& g, double x) {
  const double u = (x - g.x_min) / g.dx;
  const auto j = static_cast<std::size_t>(std::floor(u));
  if (j < 1 || j + 2 >= g.size) throw ValidationError("observation point too close to the grid edge");
  const double s = u - static_cast<double>(j);
  Stencil st;
  st.first = j - 1;
  st.w = {-s * (s - 1) * (s - 2) / 6.0, (s + 1) * (s - 1) * (s - 2) / 2.0, -(s + 1) * s * (s - 2) / 2.0,
          (s + 1) * s * (s - 1) / 6.0};
  st.dw = {-(3 * s * s - 6 * s + 2) / 6.0, (3 * s * s - 4 * s - 1) / 2.0, -(3 * s * s - 2 * s - 2) / 2.0,
           (3 * s * s - 1) / 6.0};
  for (auto& d : st.dw) d /= g.dx;
  return st;
}

struct ProbeValue {
  double density;
  double flux;
};

ProbeValue probe(const std::vector<Complex>& psi, const Stencil& st) {
  Complex v{0.0, 0.0};
  Complex d{0.0, 0.0};
  for (std::size_t k = 0; k < 4; ++k) {
    v += st.w[k] * psi[st.first + k];
    d += st.dw[k] * psi[st.first + k];
  }
  return {std::norm(v), 2.0 * (std::conj(v) * d).imag()};
}

}  // namespace

WinterConfig WinterConfig::refined(int factor) const {
  if (factor < 1) throw ValidationError("refinement factor must be >= 1");
  WinterConfig c = *this;
  c.dx /= factor;
  c.dt /= factor;
  return c;
}

void validate(const WinterConfig& cfg) {
  require(cfg.L > 0.0 && std::isfinite(cfg.L), "L must be positive");
  require(cfg.U > 0.0 && std::isfinite(cfg.U), "U must be positive");
  require(cfg.wall == WallKind::Infinite || (cfg.V > 0.0 && std::isfinite(cfg.V)), "V must be positive");
  require(cfg.dx > 0.0 && std::isfinite(cfg.dx), "dx must be positive");
  const double m = cfg.L / cfg.dx;
  require(std::abs(m - std::round(m)) < 1e-6, "dx must divide L");
  require(cfg.dt > 0.0 && std::isfinite(cfg.dt), "dt must be positive");
  require(cfg.t_max > 0.0 && std::isfinite(cfg.t_max), "t_max must be positive");
  require(cfg.x_obs > 0.0 && std::isfinite(cfg.x_obs), "x_obs must be positive");
  require(cfg.margin > 4.0 * cfg.dx, "margin between x_obs and the absorber is too small");
  require(cfg.absorber_width > 0.0 && cfg.absorber_strength > 0.0, "absorber width and strength must be positive");
  require(cfg.record_interval >= cfg.dt, "record_interval must be at least dt");
}

Grid make_grid(const WinterConfig& cfg) {
  validate(cfg);
  Grid g;
  g.x_min = -cfg.L;
  const auto m = static_cast<std::size_t>(std::lround(cfg.L / cfg.dx));
  g.dx = cfg.L / static_cast<double>(m);
  g.origin = m;
  g.size = m + static_cast<std::size_t>(std::ceil(cfg.x_max() / g.dx)) + 1;
  return g;
}

double GridState::norm() const {
  double s = 0.0;
  for (const auto& v : psi) s += std::norm(v);
  return s * grid.dx;
}

GridState initial_state_infinite(double L, const Grid& grid) {
  require_resolved(L, grid);
  GridState s;
  s.grid = grid;
  s.psi.assign(grid.size, Complex{0.0, 0.0});
  const double amp = std::sqrt(2.0 / L);
  for (std::size_t j = 1; j < grid.origin; ++j) {
    s.psi[j] = amp * std::sin(kPi * (grid.x(j) + L) / L);
  }
  normalize(s);
  return s;
}

double finite_well_wavenumber(double L, double V) {
  if (!(L > 0.0) || !(V > 0.0)) throw ValidationError("finite well needs L > 0 and V > 0");
  const double k_lo = 0.5 * kPi / L;
  const double k_hi = std::min(kPi / L, std::sqrt(V));
  if (!(k_hi > k_lo)) throw ValidationError("finite well has no bound state: V too small for this L");
  // k cos(kL) + kappa sin(kL): positive at pi/(2L), negative at the upper end.
  auto g = [&](double k) { return k * std::cos(k * L) + std::sqrt(std::max(0.0, V - k * k)) * std::sin(k * L); };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(g, k_lo, k_hi, boost::math::tools::eps_tolerance<double>(50),
                                                        iters);
  if (iters >= 200) throw ConvergenceError("finite-well wavenumber solve did not converge");
  const double k = 0.5 * (a + b);
  if (b - a > 1e-12 * k) throw ConvergenceError("finite-well wavenumber not resolved to 1e-12");
  return k;
}

GridState initial_state_finite(double L, double V, const Grid& grid) {
  require_resolved(L, grid);
  const double k = finite_well_wavenumber(L, V);
  const double kappa = std::sqrt(V - k * k);
  GridState s;
  s.grid = grid;
  s.psi.assign(grid.size, Complex{0.0, 0.0});
  const double edge = std::sin(k * L);
  for (std::size_t j = 1; j + 1 < grid.size; ++j) {
    const double x = grid.x(j);
    s.psi[j] = j <= grid.origin ? std::sin(k * (x + L)) : edge * std::exp(-kappa * x);
  }
  normalize(s);
  return s;
}

GridState initial_state(const WinterConfig& cfg, const Grid& grid) {
  return cfg.wall == WallKind::Infinite ? initial_state_infinite(cfg.L, grid)
                                        : initial_state_finite(cfg.L, cfg.V, grid);
}

WinterTrace propagate(GridState state, const WinterConfig& cfg) {
  validate(cfg);
  const Grid& g = state.grid;
  const std::size_t n = g.size;
  if (state.psi.size() != n || n < 8) throw ValidationError("state does not match its grid");
  const double n0 = state.norm();
  if (std::abs(n0 - 1.0) > 1e-10) throw ValidationError("initial state must be normalized");

  const double dx2 = g.dx * g.dx;
  const double x_abs = cfg.x_obs + cfg.margin;
  std::vector<double> W(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.x(j);
    if (x > x_abs) {
      const double r = (x - x_abs) / cfg.absorber_width;
      W[j] = cfg.absorber_strength * r * r;
    }
  }

  // A psi' = B psi with A = 1 + i dt/2 H, B = 1 - i dt/2 H on nodes 1..n-2,
  // H = -D2 + V - iW. Off-diagonals of A are -i s, those of B are +i s.
  const double s = 0.5 * cfg.dt / dx2;
  std::vector<double> wre(n), wim(n);  // diagonal of A
  for (std::size_t j = 0; j < n; ++j) {
    const double v = j == g.origin ? cfg.U / g.dx : 0.0;
    wre[j] = 1.0 + 0.5 * cfg.dt * W[j];
    wim[j] = 0.5 * cfg.dt * (2.0 / dx2 + v);
  }
  // Thomas factorization of the constant A: den_j = a_j + s^2 / den_{j-1},
  // stored as 1/den; c'_j = -i s / den_j.
  std::vector<double> inv_re(n, 0.0), inv_im(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    Complex den{wre[j], wim[j]};
    if (j > 1) den += s * s * Complex{inv_re[j - 1], inv_im[j - 1]};
    const Complex inv = 1.0 / den;
    inv_re[j] = inv.real();
    inv_im[j] = inv.imag();
  }

  const Stencil obs = cubic_stencil(g, cfg.x_obs);
  const Stencil prb = cubic_stencil(g, x_abs);
  const double leak_x = x_abs + 0.9 * cfg.absorber_width;
  const Stencil lk = cubic_stencil(g, leak_x);

  WinterTrace tr;
  tr.x_obs = cfg.x_obs;
  tr.norm_initial = n0;
  tr.probe_x = x_abs;
  tr.leak_x = leak_x;

  const auto steps = static_cast<long>(std::llround(cfg.t_max / cfg.dt));
  const long every = std::max(1L, std::lround(cfg.record_interval / cfg.dt));
  std::vector<Complex>& psi = state.psi;
  std::vector<Complex> next(n, 0.0);
  double absorbed = 0.0;
  double probe_max = 0.0;
  double leak_max = 0.0;

  for (long step = 1; step <= steps; ++step) {
    // B psi, fused with the forward sweep: d_j = (r_j + i s d_{j-1}) / den_j.
    double dre = 0.0, dim = 0.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double pr = psi[j].real(), pi = psi[j].imag();
      const double nr = psi[j - 1].real() + psi[j + 1].real();
      const double ni = psi[j - 1].imag() + psi[j + 1].imag();
      // B_jj = (2 - wre) - i wim
      const double br = 2.0 - wre[j];
      double rr = br * pr + wim[j] * pi - s * ni;
      double ri = br * pi - wim[j] * pr + s * nr;
      rr -= s * dim;
      ri += s * dre;
      dre = rr * inv_re[j] - ri * inv_im[j];
      dim = rr * inv_im[j] + ri * inv_re[j];
      next[j] = {dre, dim};
    }
    // Back substitution x_j = d_j + i s x_{j+1} / den_j, with the absorber loss.
    double loss = 0.0;
    double xr = 0.0, xi = 0.0;
    for (std::size_t j = n - 2; j >= 1; --j) {
      const double tr_ = -s * xi, ti = s * xr;  // i s x_{j+1}
      xr = next[j].real() + tr_ * inv_re[j] - ti * inv_im[j];
      xi = next[j].imag() + tr_ * inv_im[j] + ti * inv_re[j];
      next[j] = {xr, xi};
      if (W[j] != 0.0) {
        const double mr = 0.5 * (xr + psi[j].real()), mi = 0.5 * (xi + psi[j].imag());
        loss += W[j] * (mr * mr + mi * mi);
      }
    }
    absorbed += 2.0 * cfg.dt * loss * g.dx;
    psi.swap(next);

    if (step % every == 0 || step == steps) {
      const double t = static_cast<double>(step) * cfg.dt;
      const ProbeValue o = probe(psi, obs);
      tr.t.push_back(t);
      tr.density.push_back(o.density);
      tr.flux.push_back(o.flux);
      probe_max = std::max(probe_max, probe(psi, prb).density);
      leak_max = std::max(leak_max, probe(psi, lk).density);

      state.time = t;
      const double drift = std::abs(state.norm() + absorbed - n0) / n0;
      tr.max_norm_drift = std::max(tr.max_norm_drift, drift);
      if (drift > 1e-6) {
        std::ostringstream os;
        os << "norm balance drifted by " << drift << " at t = " << t << " (norm " << state.norm()
           << ", absorbed " << absorbed << ")";
        throw NumericError(os.str());
      }
    }
  }
  tr.norm_final = state.norm();
  tr.absorbed = absorbed;
  tr.leak = probe_max > 0.0 ? leak_max / probe_max : 0.0;
  tr.contaminated = tr.leak > 1e-4;
  return tr;
}

WinterTrace run_winter(const WinterConfig& cfg) {
  const Grid g = make_grid(cfg);
  return propagate(initial_state(cfg, g), cfg);
}

TimeWindow resonance_window(double x_obs, double t_end) { return {0.75 * x_obs, t_end}; }

TimeWindow front_window(double x_obs, double t_end) { return {0.5 * x_obs, t_end}; }

std::vector<double> smooth_trace(std::span<const double> t, std::span<const double> y, double sigma) {
  if (t.size() != y.size()) throw ValidationError("sampled trace: t and y differ in length");
  if (!(sigma > 0.0)) throw ValidationError("smoothing width must be positive");
  if (t.size() < 2) return {y.begin(), y.end()};
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs(t[i] - t[i - 1] - h) > 1e-6 * h) throw ValidationError("smoothing needs a uniform time grid");
  }
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma / h));
  std::vector<double> w(static_cast<std::size_t>(half) + 1);
  for (std::ptrdiff_t k = 0; k <= half; ++k) {
    const double u = static_cast<double>(k) * h / sigma;
    w[static_cast<std::size_t>(k)] = std::exp(-0.5 * u * u);
  }
  const auto n = static_cast<std::ptrdiff_t>(y.size());
  std::vector<double> out(y.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    double wsum = 0.0;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - half); j <= std::min(n - 1, i + half); ++j) {
      const double wj = w[static_cast<std::size_t>(std::abs(j - i))];
      acc += wj * y[static_cast<std::size_t>(j)];
      wsum += wj;
    }
    out[static_cast<std::size_t>(i)] = acc / wsum;
  }
  return out;
}

std::vector<Extremum> trace_maxima(std::span<const double> t, std::span<const double> y, TimeWindow window) {
  if (t.size() != y.size()) throw ValidationError("sampled trace: t and y differ in length");
  std::size_t lo = 0;
  while (lo < t.size() && t[lo] < window.begin) ++lo;
  std::size_t hi = lo;
  while (hi < t.size() && t[hi] <= window.end) ++hi;
  auto maxima = find_extrema_sampled(t.subspan(lo, hi - lo), y.subspan(lo, hi - lo), ExtremumKind::Maximum);
  if (maxima.empty()) return maxima;
  const auto principal =
      std::max_element(maxima.begin(), maxima.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  maxima.erase(maxima.begin(), principal);
  return maxima;
}

VisibilityPoint trace_visibility(std::span<const double> t, std::span<const double> y, TimeWindow window) {
  VisibilityPoint v;
  const auto maxima = trace_maxima(t, y, window);
  v.maxima_found = static_cast<int>(maxima.size());
  if (maxima.size() < 2) return v;
  v.t_max1 = maxima[0].t;
  v.t_max2 = maxima[1].t;
  double lowest = maxima[1].value;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > v.t_max1 && t[i] < v.t_max2 && y[i] < lowest) {
      lowest = y[i];
      v.t_min = t[i];
    }
  }
  v.delta = maxima[1].value - lowest;
  return v;
}

std::vector<double> source_overlay(const SourceFit& fit, double x_obs, std::span<const double> t) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out[i] = fit.scale * scaled_sample(fit.k0R, fit.k0I, x_obs, t[i]).density;
  }
  return out;
}

namespace {

struct WindowData {
  std::vector<double> t;
  std::vector<double> log_rho;
};

// Sum of squared log residuals with the amplitude profiled out; also returns it.
double log_sse(const WindowData& d, double x_obs, double k0R, double k0I, double* log_scale) {
  std::vector<double> r(d.t.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    r[i] = d.log_rho[i] - std::log(scaled_sample(k0R, k0I, x_obs, d.t[i]).density);
    mean += r[i];
  }
  mean /= static_cast<double>(r.size());
  double sse = 0.0;
  for (double v : r) sse += (v - mean) * (v - mean);
  if (log_scale) *log_scale = mean;
  return sse;
}

}  // namespace

SourceFit fit_source_model(const WinterTrace& trace, TimeWindow window) {
  WindowData d;
  double ratio_sum = 0.0;
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (trace.t[i] < window.begin || trace.t[i] > window.end) continue;
    if (!(trace.density[i] > 0.0)) continue;
    d.t.push_back(trace.t[i]);
    d.log_rho.push_back(std::log(trace.density[i]));
    ratio_sum += trace.flux[i] / trace.density[i];
  }
  const std::size_t m = d.t.size();
  if (m < 32 || d.t.back() - d.t.front() < 5.0 * 2.0 * kPi) {
    throw ConvergenceError("fit window too short: need at least 32 samples spanning 5 carrier periods");
  }

  // Initial carrier: velocity 2 k0R, log-density slope 2 omega0I = 4 k0R k0I.
  const double k0R0 = 0.5 * ratio_sum / static_cast<double>(m);
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    tm += d.t[i];
    ym += d.log_rho[i];
  }
  tm /= static_cast<double>(m);
  ym /= static_cast<double>(m);
  double sty = 0.0, stt = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sty += (d.t[i] - tm) * (d.log_rho[i] - ym);
    stt += (d.t[i] - tm) * (d.t[i] - tm);
  }
  if (!(k0R0 > 0.0) || !std::isfinite(k0R0)) {
    throw ConvergenceError("fit: mean flux/density is not positive; window is not an outgoing decay");
  }
  const double k0I0 = std::clamp(sty / stt / (4.0 * k0R0), -0.5 * k0R0, 0.0);

  SourceFit fit;
  fit.k0R = k0R0;
  fit.k0I = k0I0;
  const double span_I = std::max(2.0 * std::abs(k0I0), 1e-3);
  for (int sweep = 0; sweep < 3; ++sweep) {
    const double r_lo = fit.k0R * 0.99;
    const double r_hi = fit.k0R * 1.01;
    fit.k0R = golden_section([&](double k) { return log_sse(d, trace.x_obs, k, fit.k0I, nullptr); }, r_lo, r_hi,
                             1e-10, ExtremumKind::Minimum)
                  .t;
    const double i_lo = std::max(fit.k0I - span_I, -0.5 * fit.k0R);
    const double i_hi = std::min(fit.k0I + span_I, 0.0);
    fit.k0I = golden_section([&](double k) { return log_sse(d, trace.x_obs, fit.k0R, k, nullptr); }, i_lo, i_hi,
                             1e-12, ExtremumKind::Minimum)
                  .t;
  }
  double log_scale = 0.0;
  log_sse(d, trace.x_obs, fit.k0R, fit.k0I, &log_scale);
  fit.scale = std::exp(log_scale);
  fit.samples = m;

  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double model = fit.scale * scaled_sample(fit.k0R, fit.k0I, trace.x_obs, d.t[i]).density;
    const double rel = std::exp(d.log_rho[i]) / model - 1.0;
    rss += rel * rel;
  }
  fit.residual = std::sqrt(rss / static_cast<double>(m));
  return fit;
}

}  // namespace dit
