#include "dit/dit_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "dit/decomposition.hpp"
#include "dit/kernels.hpp"

namespace dit {

namespace {

constexpr double kPi = std::numbers::pi;

double discriminant(const Carrier& c, double x, int n) {
  const double a = (3.0 + 8.0 * n) * kPi + 4.0 * x;
  return a * a - 16.0 * c.omega0R() * x * x;
}

}  // namespace

double predict_Tn(const Carrier& c, double x, int n) {
  if (!std::isfinite(x) || x < 0.0) throw ValidationError("position x must be finite and >= 0");
  if (n < 0) throw ValidationError("maximum index n must be >= 0");
  const double disc = discriminant(c, x, n);
  if (disc < 0.0) {
    throw NumericError("no real maximum predicted for n = " + std::to_string(n) +
                       " at x = " + std::to_string(x));
  }
  const double a = (3.0 + 8.0 * n) * kPi + 4.0 * x;
  return (a + std::sqrt(disc)) / (8.0 * c.omega0R());
}

int nearest_maximum_index(const Carrier& c, double x, double t) {
  const double phi = interference_factors(c, make_point(c, x, t)).phi;
  return std::max(0, static_cast<int>(std::lround(phi / (2.0 * kPi))));
}

TimeWindow default_extremum_window(const Carrier& c, double x) {
  const double tc = pole_onset_time(c, x);
  const double begin = std::max(0.5 * tc, 1e-3 * c.period());
  return {begin, tc + 40.0 * c.period()};
}

TimeWindow maxima_window(const Carrier& c, double x, int n_max) {
  if (n_max < 0) throw ValidationError("n_max must be >= 0");
  const TimeWindow base = default_extremum_window(c, x);
  return {base.begin, std::max(base.end, predict_Tn(c, x, n_max + 1) + 2.0 * c.period())};
}

std::vector<Extremum> locate_extrema(const Carrier& c, double x, TimeWindow window, ExtremumKind kind,
                                     ExtremaOptions opts) {
  if (!(window.begin > 0.0) || !(window.end > window.begin)) {
    throw ValidationError("extremum window must satisfy 0 < begin < end");
  }
  if (!(opts.samples_per_period > 0.0) || !(opts.relative_tol > 0.0)) {
    throw ValidationError("extremum resolution parameters must be positive");
  }
  const double scale = c.k0I < 0.0 ? 1.0 / norm_constant(c) : 1.0;
  auto density = [&](double t) { return sample(c, make_point(c, x, t)).density * scale; };
  const double period = c.period();
  return find_extrema(density, window.begin, window.end, period / opts.samples_per_period,
                      opts.relative_tol * period, kind);
}

std::vector<MaximaRecord> maxima_table(const Carrier& c, double x, TimeWindow window, int n_max,
                                       ExtremaOptions opts) {
  const auto maxima = locate_extrema(c, x, window, ExtremumKind::Maximum, opts);

  // n -> measured time, keeping the candidate closest to the prediction.
  std::map<int, double> measured;
  for (const auto& m : maxima) {
    const int n = nearest_maximum_index(c, x, m.t);
    const double tp = predict_Tn(c, x, n);
    auto it = measured.find(n);
    if (it == measured.end() || std::abs(m.t - tp) < std::abs(it->second - tp)) measured[n] = m.t;
  }

  std::vector<MaximaRecord> out;
  for (const auto& [n, t] : measured) {
    if (n > n_max) break;
    auto next = measured.find(n + 1);
    if (next == measured.end()) continue;
    MaximaRecord r;
    r.n = n;
    r.t_predicted = predict_Tn(c, x, n);
    r.t_measured = t;
    r.interval_predicted = predict_Tn(c, x, n + 1) - r.t_predicted;
    r.interval_measured = next->second - t;
    out.push_back(r);
  }
  return out;
}

double first_max_trajectory(double t0) {
  if (!(t0 >= 0.75 * kPi)) throw ValidationError("first-maximum trajectory needs t0 >= 3 pi / 4");
  return 2.0 * t0 - std::sqrt(3.0 * kPi * t0);
}

double trajectory_tangent_intercept(double t) {
  const double x0 = first_max_trajectory(t);
  const double slope = 2.0 - 0.5 * std::sqrt(3.0 * kPi / t);
  return t - x0 / slope;
}

VisibilityPoint visibility_of(const std::function<double(double)>& density, TimeWindow window,
                              double step, double tol) {
  VisibilityPoint v;
  const auto maxima = find_extrema(density, window.begin, window.end, step, tol, ExtremumKind::Maximum);
  v.maxima_found = static_cast<int>(maxima.size());
  if (maxima.size() < 2) return v;
  v.t_max1 = maxima[0].t;
  v.t_max2 = maxima[1].t;
  const auto minima = find_extrema(density, v.t_max1, v.t_max2, step, tol, ExtremumKind::Minimum);
  if (minima.empty()) return v;
  const Extremum& lo = minima.back();
  v.t_min = lo.t;
  v.delta = std::max(0.0, maxima[1].value - lo.value);
  return v;
}

VisibilityPoint visibility(const Carrier& c, double x, double norm, ExtremaOptions opts) {
  if (!(norm > 0.0)) throw ValidationError("visibility needs a positive normalization constant");
  const double scale = 1.0 / norm;
  auto density = [&](double t) { return sample(c, make_point(c, x, t)).density * scale; };
  const double period = c.period();
  VisibilityPoint v = visibility_of(density, default_extremum_window(c, x), period / opts.samples_per_period,
                                    opts.relative_tol * period);
  v.k0I = c.k0I;
  v.x = x;
  return v;
}

VisibilityPoint visibility(const Carrier& c, double x, ExtremaOptions opts) {
  if (!std::isfinite(x) || x < 0.0) throw ValidationError("position x must be finite and >= 0");
  return visibility(c, x, norm_constant(c), opts);
}

VisibilityPoint select_best(std::span<const VisibilityPoint> surface) {
  const VisibilityPoint* best = nullptr;
  for (const auto& p : surface) {
    if (p.error) continue;
    if (best == nullptr || p.delta > best->delta ||
        (p.delta == best->delta &&
         (std::abs(p.k0I) < std::abs(best->k0I) || (std::abs(p.k0I) == std::abs(best->k0I) && p.x < best->x)))) {
      best = &p;
    }
  }
  if (best == nullptr) throw NumericError("visibility scan: every grid point failed");
  return *best;
}

VisibilityScan visibility_scan(std::span<const double> k0I_grid, std::span<const double> x_grid,
                               ExtremaOptions opts) {
  if (k0I_grid.empty() || x_grid.empty()) throw ValidationError("visibility scan grids must be non-empty");
  for (double k : k0I_grid) {
    if (!(k < 0.0)) throw ValidationError("visibility scan needs strictly negative k0I values");
    make_carrier(k);
  }
  for (double x : x_grid) {
    if (!std::isfinite(x) || x < 0.0) throw ValidationError("visibility scan positions must be >= 0");
  }

  std::vector<VisibilityTask> tasks;
  tasks.reserve(k0I_grid.size() * x_grid.size());
  for (double k : k0I_grid) {
    double norm = 0.0;
    try {
      norm = norm_constant(make_carrier(k));
    } catch (const NumericError&) {
      norm = -1.0;  // recorded per point below
    }
    for (double x : x_grid) tasks.push_back({k, x, norm});
  }

  VisibilityScan scan;
  scan.surface = parallel::visibility_surface(tasks, opts);
  scan.best = select_best(scan.surface);
  return scan;
}

double observability_bound(const Carrier& c, double N) {
  if (!(c.k0I < 0.0)) throw ValidationError("observability bound needs k0I < 0");
  auto excess = [&](double x) { return predict_Tn(c, x, 1) - predict_Tn(c, x, 0) - N * c.tau0; };
  if (!(N > 0.0) || excess(0.0) >= 0.0) {
    throw NumericError("no positive x satisfies T_1 - T_0 < N tau0 for N = " + std::to_string(N));
  }
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi) || hi > 1e300) throw NumericError("observability bound: no upper bracket");
  }
  for (int it = 0; it < 400 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace dit
