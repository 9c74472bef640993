#include "vtrace/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vtrace/error.hpp"
#include "vtrace/rng.hpp"

namespace vtrace {

double trajectory_movement(const PointTrajectory& traj) {
  if (traj.length() < 2) {
    throw validation_error("trajectory movement needs at least 2 points");
  }
  double total = 0.0;
  for (int t = 1; t < traj.length(); ++t) {
    total += std::abs(traj.points[t].x - traj.points[t - 1].x) +
             std::abs(traj.points[t].y - traj.points[t - 1].y);
  }
  return total;
}

ActiveSet filter_active(std::span<const PointTrajectory> trajectories,
                        double kappa) {
  if (kappa < 0.0) throw validation_error("kappa must be >= 0");
  ActiveSet active;
  active.kappa = kappa;
  active.total_input = static_cast<int>(trajectories.size());
  for (const PointTrajectory& traj : trajectories) {
    if (!traj.fully_valid()) continue;
    if (traj.length() >= 2 && trajectory_movement(traj) > kappa) {
      active.trajectories.push_back(traj);
    }
  }
  return active;
}

TraceSet sample_traces(const ActiveSet& active, int sample_count,
                       std::uint64_t seed, int window_start) {
  if (sample_count < 1) throw validation_error("sample_count must be >= 1");
  const int n = static_cast<int>(active.trajectories.size());

  TraceSet set;
  set.window_start = window_start;
  const int len = n > 0 ? active.trajectories.front().length() : 1;
  set.window_end = window_start + len - 1;

  if (n <= sample_count) {
    set.traces = active.trajectories;
    return set;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  for (int i = 0; i < sample_count; ++i) {
    const std::uint64_t j =
        i + rng.next_below(static_cast<std::uint64_t>(n - i));
    std::swap(order[i], order[j]);
  }
  order.resize(sample_count);
  std::sort(order.begin(), order.end());

  set.traces.reserve(sample_count);
  for (int idx : order) set.traces.push_back(active.trajectories[idx]);
  return set;
}

}  // namespace vtrace
