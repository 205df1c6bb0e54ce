#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dit/extrema.hpp"
#include "dit/source_model.hpp"

namespace dit {

/// Time of the n-th density maximum predicted from phi(x, T_n) = 2 n pi:
///   T_n = [a + sqrt(a^2 - 16 omega0R x^2)] / (8 omega0R),  a = (3 + 8n) pi + 4x.
/// Throws ValidationError for x < 0 and NumericError for a negative
/// discriminant.
double predict_Tn(const Carrier& c, double x, int n);

/// Index n of the predicted maximum closest to time t at position x.
int nearest_maximum_index(const Carrier& c, double x, double t);

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

/// [0.5 t_c, t_c + 40 periods], clipped to t > 0.
TimeWindow default_extremum_window(const Carrier& c, double x);

/// Window wide enough to measure maxima 0..n_max+1: from the default start to
/// two periods past the predicted T_{n_max+1}.
TimeWindow maxima_window(const Carrier& c, double x, int n_max);

struct ExtremaOptions {
  /// Samples per asymptotic period before golden-section refinement.
  double samples_per_period = 40.0;
  /// Refinement tolerance in units of the period.
  double relative_tol = 1e-6;
};

/// Local extrema of the exact density at x (normalized when k0I < 0).
std::vector<Extremum> locate_extrema(const Carrier& c, double x, TimeWindow window,
                                     ExtremumKind kind, ExtremaOptions opts = {});

struct MaximaRecord {
  int n = 0;
  double t_predicted = 0.0;
  double t_measured = 0.0;
  double interval_predicted = 0.0;
  double interval_measured = 0.0;
};

/// Pairs each measured maximum in `window` with the nearest predicted T_n
/// and emits a record for every n whose successor was also measured.
/// Only records with n <= n_max are returned.
std::vector<MaximaRecord> maxima_table(const Carrier& c, double x, TimeWindow window, int n_max,
                                       ExtremaOptions opts = {});

/// Position of the principal maximum at time t0 for k0I -> 0:
/// x0 = 2 t0 - sqrt(3 pi t0). Requires t0 >= 3 pi / 4, where x0 = 0.
double first_max_trajectory(double t0);

/// Time at which the tangent to x0(t) at t crosses x0 = 0.
double trajectory_tangent_intercept(double t);

struct VisibilityPoint {
  double k0I = 0.0;
  double x = 0.0;
  double delta = 0.0;  ///< second maximum minus the preceding minimum
  double t_max1 = 0.0;
  double t_min = 0.0;
  double t_max2 = 0.0;
  int maxima_found = 0;
  std::optional<std::string> error;
};

/// Visibility of the DIT pattern at x, from the normalized density. The
/// first maximum in the default window is the principal one; delta is the
/// second maximum minus the last minimum before it. Zero with fewer than
/// two maxima. Requires k0I < 0.
VisibilityPoint visibility(const Carrier& c, double x, ExtremaOptions opts = {});
/// As above with a precomputed norm_constant(c).
VisibilityPoint visibility(const Carrier& c, double x, double norm, ExtremaOptions opts);

/// Same measurement on an arbitrary trace (normalized or not) through
/// the supplied density function.
VisibilityPoint visibility_of(const std::function<double(double)>& density, TimeWindow window,
                              double step, double tol);

struct VisibilityScan {
  VisibilityPoint best;
  std::vector<VisibilityPoint> surface;  ///< row-major: k0I outer, x inner
};

/// Maximum of delta over the grid. Ties go to smaller |k0I|, then smaller x.
/// Points that fail are kept with `error` set and skipped by the argmax.
VisibilityScan visibility_scan(std::span<const double> k0I_grid, std::span<const double> x_grid,
                               ExtremaOptions opts = {});

/// Deterministic argmax over a gathered surface with the tie rule above.
VisibilityPoint select_best(std::span<const VisibilityPoint> surface);

/// Largest x with T_1(x) - T_0(x) < N tau0, by bisection. Throws
/// NumericError when no positive x satisfies it. Requires k0I < 0.
double observability_bound(const Carrier& c, double N);

}  // namespace dit
