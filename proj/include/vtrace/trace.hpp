#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vtrace/core.hpp"

namespace vtrace {

// Trajectories whose total l1 movement strictly exceeds kappa and that are
// valid over their whole window. Input order is preserved.
struct ActiveSet {
  std::vector<PointTrajectory> trajectories;
  double kappa = 0.0;
  int total_input = 0;
};

// Sum over adjacent position pairs of |dx| + |dy|.
double trajectory_movement(const PointTrajectory& traj);

ActiveSet filter_active(std::span<const PointTrajectory> trajectories,
                        double kappa);

// Uniform sampling without replacement: Fisher-Yates partial shuffle driven
// by splitmix64, re-sorted into input order. If the active set has at most
// sample_count members, all of them are returned unchanged.
TraceSet sample_traces(const ActiveSet& active, int sample_count,
                       std::uint64_t seed, int window_start = 0);

}  // namespace vtrace
