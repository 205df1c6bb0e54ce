#include <omp.h>

#include <atomic>
#include <exception>

#include "dit/kernels.hpp"
#include "kernel_points.hpp"

namespace dit {

namespace {

std::atomic<int> g_max_threads{0};

int team_size() {
  const int cap = g_max_threads.load(std::memory_order_relaxed);
  return cap > 0 ? cap : omp_get_max_threads();
}

// Runs body(i) for i in [0, n) across the team. Exceptions cannot leave an
// OpenMP region, so each one is parked in its slot and the lowest-index
// failure is rethrown afterwards, the same one the serial loop would hit.
template <class Body>
void for_each_index(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<bool> failed{false};
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(team_size())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failed.load()) {
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
}

}  // namespace

void set_max_threads(int n) { g_max_threads.store(n > 0 ? n : 0, std::memory_order_relaxed); }

int max_threads() { return team_size(); }

namespace parallel {

std::vector<TracePoint> trace(const Carrier& c, double x, std::span<const double> t_grid, double scale) {
  std::vector<TracePoint> out(t_grid.size());
  for_each_index(t_grid.size(), [&](std::size_t i) { out[i] = detail::trace_point(c, x, t_grid[i], scale); });
  return out;
}

std::vector<TraceRow> trace_rows(const Carrier& c, double x, std::span<const double> t_grid, double scale) {
  std::vector<TraceRow> out(t_grid.size());
  for_each_index(t_grid.size(), [&](std::size_t i) { out[i] = detail::trace_row(c, x, t_grid[i], scale); });
  return out;
}

std::vector<VisibilityPoint> visibility_surface(std::span<const VisibilityTask> tasks, ExtremaOptions opts) {
  std::vector<VisibilityPoint> out(tasks.size());
  // visibility_point never throws; failures are recorded on the point.
  for_each_index(tasks.size(), [&](std::size_t i) { out[i] = detail::visibility_point(tasks[i], opts); });
  return out;
}

}  // namespace parallel
}  // namespace dit
