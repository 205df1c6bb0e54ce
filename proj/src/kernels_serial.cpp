#include "dit/kernels.hpp"

#include "kernel_points.hpp"

namespace dit::serial {

std::vector<TracePoint> trace(const Carrier& c, double x, std::span<const double> t_grid, double scale) {
  std::vector<TracePoint> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = detail::trace_point(c, x, t_grid[i], scale);
  return out;
}

std::vector<TraceRow> trace_rows(const Carrier& c, double x, std::span<const double> t_grid, double scale) {
  std::vector<TraceRow> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = detail::trace_row(c, x, t_grid[i], scale);
  return out;
}

std::vector<VisibilityPoint> visibility_surface(std::span<const VisibilityTask> tasks, ExtremaOptions opts) {
  std::vector<VisibilityPoint> out(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) out[i] = detail::visibility_point(tasks[i], opts);
  return out;
}

}  // namespace dit::serial
