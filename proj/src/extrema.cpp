#include "dit/extrema.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dit/error.hpp"

namespace dit {

namespace {

constexpr double kInvPhi = 0.61803398874989484820;  // 1/phi

double sign_of(ExtremumKind kind) { return kind == ExtremumKind::Maximum ? 1.0 : -1.0; }

// Indices i with y[i] a strict local extremum of sign*y, ignoring sub-noise wiggles.
std::vector<std::size_t> bracket_indices(std::span<const double> y, ExtremumKind kind) {
  std::vector<std::size_t> out;
  if (y.size() < 3) return out;
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() * peak;
  const double s = sign_of(kind);
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double l = s * y[i - 1];
    const double m = s * y[i];
    const double r = s * y[i + 1];
    if (m > l && m >= r && m - std::min(l, r) > floor) out.push_back(i);
  }
  return out;
}

}  // namespace

GoldenResult golden_section(const std::function<double(double)>& f, double a, double b, double tol,
                            ExtremumKind kind, int max_iter) {
  if (!(b > a)) throw ValidationError("golden_section: empty bracket");
  if (!(tol > 0.0)) throw ValidationError("golden_section: tolerance must be positive");
  const double s = sign_of(kind);
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = s * f(c);
  double fd = s * f(d);
  GoldenResult res;
  while (b - a > tol && res.iterations < max_iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = s * f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = s * f(d);
    }
    ++res.iterations;
  }
  res.converged = b - a <= tol;
  res.t = fc > fd ? c : d;
  res.value = s * std::max(fc, fd);
  return res;
}

std::vector<Extremum> find_extrema(const std::function<double(double)>& f, double t0, double t1,
                                   double step, double tol, ExtremumKind kind) {
  if (!(t1 > t0)) throw ValidationError("extremum window must have t1 > t0");
  if (!(step > 0.0)) throw ValidationError("extremum sampling step must be positive");
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step)) + 1;
  std::vector<double> ts(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = t0 + static_cast<double>(i) * step;
    ys[i] = f(ts[i]);
  }
  std::vector<Extremum> out;
  for (std::size_t i : bracket_indices(ys, kind)) {
    const GoldenResult g = golden_section(f, ts[i - 1], ts[i + 1], tol, kind);
    // Never report a refined value worse than the sample that seeded it.
    const bool keep_sample = sign_of(kind) * ys[i] > sign_of(kind) * g.value;
    out.push_back({keep_sample ? ts[i] : g.t, keep_sample ? ys[i] : g.value, g.converged});
  }
  return out;
}

std::vector<Extremum> find_extrema_sampled(std::span<const double> t, std::span<const double> y,
                                           ExtremumKind kind) {
  if (t.size() != y.size()) throw ValidationError("sampled trace: t and y differ in length");
  std::vector<Extremum> out;
  for (std::size_t i : bracket_indices(y, kind)) {
    const double t0 = t[i - 1], t1 = t[i], t2 = t[i + 1];
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    const double d01 = (y1 - y0) / (t1 - t0);
    const double d12 = (y2 - y1) / (t2 - t1);
    const double curv = (d12 - d01) / (t2 - t0);
    Extremum e{t1, y1, true};
    if (curv != 0.0) {
      // vertex of the interpolating parabola
      const double tv = 0.5 * (t0 + t1) - 0.5 * d01 / curv;
      if (tv > t0 && tv < t2) {
        e.t = tv;
        e.value = y1 + (tv - t1) * (d01 + curv * (tv - t0));
      }
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace dit
