#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dit {

enum class ExtremumKind { Maximum, Minimum };

struct Extremum {
  double t = 0.0;
  double value = 0.0;
  bool converged = true;
};

struct GoldenResult {
  double t = 0.0;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Golden-section search for the single extremum of f inside [a, b],
/// stopping once the bracket is narrower than tol.
GoldenResult golden_section(const std::function<double(double)>& f, double a, double b, double tol,
                            ExtremumKind kind, int max_iter = 200);

/// Samples f on [t0, t1] with spacing `step`, brackets every strict local
/// extremum between neighbouring samples and refines it with golden-section
/// search to `tol`. Sample-to-sample differences below a few ulps of the
/// trace magnitude are treated as flat, so a constant trace yields nothing.
std::vector<Extremum> find_extrema(const std::function<double(double)>& f, double t0, double t1,
                                   double step, double tol, ExtremumKind kind);

/// Same bracketing on an already sampled trace; each extremum is refined to
/// the vertex of the parabola through the three samples around it.
std::vector<Extremum> find_extrema_sampled(std::span<const double> t, std::span<const double> y,
                                           ExtremumKind kind);

}  // namespace dit
