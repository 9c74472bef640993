#pragma once

#include <span>
#include <vector>

#include "vtrace/core.hpp"

namespace vtrace {

// Pyramidal Lucas-Kanade settings. The effective tracking window is
// (2*window_half+1)^2; min_eigen is compared against the smaller eigenvalue
// of the structure matrix divided by the window pixel count.
struct TrackerConfig {
  int pyramid_levels = 3;  // pyramid holds pyramid_levels + 1 images
  int window_half = 5;     // 11x11 window
  int max_iters = 30;
  double epsilon = 0.01;   // convergence threshold on the per-iteration update
  double min_eigen = 1e-4;

  std::string check() const;
};

// Single-channel float image, values in [0, 255].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

  // Bilinear sample; caller guarantees 0 <= x <= width-1, 0 <= y <= height-1.
  double sample(double x, double y) const;
};

// Grayscale pyramid: level 0 is full resolution, each level above is a 2x2
// box average at ceil-halved dimensions.
struct Pyramid {
  std::vector<GrayImage> levels;

  const GrayImage& level(int i) const { return levels[i]; }
};

enum class TrackStatus { tracked, lost, out_of_bounds };

struct TrackResult {
  Vec2 position;
  TrackStatus status = TrackStatus::tracked;
};

// Rec. 601 luminance of an RGB frame.
GrayImage to_luminance(const Frame& frame);

// Builds the pyramid for one frame. Rejects configurations whose coarsest
// level cannot contain a full tracking window.
Pyramid build_pyramid(const Frame& frame, const TrackerConfig& config);
Pyramid build_pyramid(GrayImage level0, const TrackerConfig& config);

// One coarse-to-fine LK step between two pyramids. Lost/out-of-bounds
// results return the input position unchanged.
TrackResult track_point(const Pyramid& prev, const Pyramid& next, Vec2 p,
                        const TrackerConfig& config);

// Chains track_point over consecutive frame pairs starting at the first
// frame. A point that stops tracking stays at its last valid position with
// valid=false for all remaining steps. One trajectory per query, in query
// order; origins are the query indices. OpenMP-parallel over queries.
std::vector<PointTrajectory> track_points(std::span<const Frame> frames,
                                          std::span<const Vec2> queries,
                                          const TrackerConfig& config);
std::vector<PointTrajectory> track_points(std::span<const Pyramid> pyramids,
                                          std::span<const Vec2> queries,
                                          const TrackerConfig& config);

// Plain-loop reference driver; must produce byte-identical trajectories to
// track_points for any worker count.
std::vector<PointTrajectory> track_points_serial(
    std::span<const Pyramid> pyramids, std::span<const Vec2> queries,
    const TrackerConfig& config);

// Cell-center query grid: x_i = (i + 0.5) * width / k, row-major (y outer).
std::vector<Vec2> grid_queries(int width, int height, int k);

// Dense K x K grid track over a frame window.
std::vector<PointTrajectory> track_grid(std::span<const Frame> frames, int k,
                                        const TrackerConfig& config);
std::vector<PointTrajectory> track_grid(std::span<const Pyramid> pyramids,
                                        int width, int height, int k,
                                        const TrackerConfig& config);

std::vector<Pyramid> build_pyramids(std::span<const Frame> frames,
                                    const TrackerConfig& config);

}  // namespace vtrace
