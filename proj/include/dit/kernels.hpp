#pragma once

// Grid kernels in two flavours. `serial` is the plain reference loop;
// `parallel` distributes the same per-point work with OpenMP. Every output
// slot is written by exactly one iteration from the same inputs, so the two
// agree bit for bit at any thread count.

#include <span>
#include <vector>

#include "dit/decomposition.hpp"
#include "dit/dit_analysis.hpp"
#include "dit/source_model.hpp"

namespace dit {

/// One row of the full trace table: exact sample plus its decomposition.
struct TraceRow {
  double t = 0.0;
  double density_exact = 0.0;
  double flux = 0.0;
  double density_approx = 0.0;
  double saddle_sq = 0.0;
  double pole_sq = 0.0;
  double interference = 0.0;
  bool pole_active = false;
  bool near_singular = false;  ///< t at the real saddle pole (k0I = 0); decomposition columns are NaN
};

/// Inputs for one visibility grid point.
struct VisibilityTask {
  double k0I = 0.0;
  double x = 0.0;
  double norm = 0.0;  ///< norm_constant for k0I
};

namespace serial {
std::vector<TracePoint> trace(const Carrier& c, double x, std::span<const double> t_grid, double scale);
std::vector<TraceRow> trace_rows(const Carrier& c, double x, std::span<const double> t_grid, double scale);
std::vector<VisibilityPoint> visibility_surface(std::span<const VisibilityTask> tasks, ExtremaOptions opts);
}  // namespace serial

namespace parallel {
std::vector<TracePoint> trace(const Carrier& c, double x, std::span<const double> t_grid, double scale);
std::vector<TraceRow> trace_rows(const Carrier& c, double x, std::span<const double> t_grid, double scale);
std::vector<VisibilityPoint> visibility_surface(std::span<const VisibilityTask> tasks, ExtremaOptions opts);
}  // namespace parallel

/// Caps the OpenMP team size used by the parallel kernels; 0 restores the default.
void set_max_threads(int n);
int max_threads();

}  // namespace dit
