#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vtrace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// One RGB observation frame. Pixels are row-major 8-bit RGB triples;
// `index` is the timestep ordinal within the owning episode.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  int index = 0;

  static constexpr int kMinSide = 32;

  std::size_t expected_bytes() const {
    return static_cast<std::size_t>(width) * height * 3;
  }
};

// One demonstration: ordered frames, per-step continuous actions, and a
// language instruction. The unit of annotation.
struct Episode {
  std::vector<Frame> frames;
  std::vector<std::vector<double>> actions;
  std::string instruction;
  std::string id;

  int length() const { return static_cast<int>(frames.size()); }
};

// Pipeline knobs for trace extraction. Defaults are the production values:
// a 40x40 grid, 5 sampled traces over a 6-step window, dense recalibration
// every 20 streaming steps.
struct TraceConfig {
  int grid_size = 40;        // K: query points per side
  int sample_count = 5;      // M: traces kept per prompt
  int window = 6;            // N: timesteps of history per trace
  double kappa = 2.0;        // total l1 movement threshold, pixels
  double dropout_prob = 0.1; // probability a step's trace is dropped
  int redraw_steps = 20;     // streaming steps between dense recalibrations
  std::uint64_t seed = 0;

  // Returns an empty string when valid, else the violated constraint.
  std::string check() const;
};

// A single point's track over a time window. Positions where valid=false
// repeat the last valid position, so downstream sums and overlays stay
// well-defined.
struct PointTrajectory {
  std::vector<Vec2> points;
  std::vector<std::uint8_t> valid;  // one flag per point
  int origin = 0;                   // grid cell (row-major) or query index

  int length() const { return static_cast<int>(points.size()); }

  bool fully_valid() const {
    for (std::uint8_t v : valid)
      if (!v) return false;
    return !valid.empty();
  }
};

// The sampled active trajectories used for one visual prompt, together with
// the absolute timestep window they cover.
struct TraceSet {
  std::vector<PointTrajectory> traces;
  int window_start = 0;
  int window_end = 0;

  bool empty() const { return traces.empty(); }
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Pure structural check of the Episode invariants: consistent frame sizes,
// minimum frame dimensions, pixel buffer sizes, action list length and
// dimensionality. Violations are data, not failures.
ValidationReport validate_episode(const Episode& episode);

}  // namespace vtrace
