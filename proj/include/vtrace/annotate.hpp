#pragma once

#include <optional>
#include <vector>

#include "vtrace/core.hpp"
#include "vtrace/overlay.hpp"
#include "vtrace/tracker.hpp"

namespace vtrace {

// Half-open frame range tracked by one dense track_grid call.
struct Segment {
  int start = 0;
  int end = 0;
};

// One timestep's annotation. Steps with fewer than N frames of history have
// no trace and no overlay; from t = N on, the trace is present (possibly
// empty when nothing moved) and the overlay is rendered, an unmodified copy
// in the empty case.
struct StepAnnotation {
  int timestep = 0;
  std::optional<TraceSet> trace;
  std::optional<Frame> overlaid;
  bool dropped = false;
  int history_len = 0;
};

struct AnnotateResult {
  std::vector<StepAnnotation> steps;
  int dense_calls = 0;  // track_grid invocations, one per segment
};

// Overlapping 2N-frame segments [kN, min(kN+2N, T)) for k = 0,1,... while
// kN + N < T (k = 0 always emitted). Every timestep t >= N falls in a
// segment whose start is at most t - N.
std::vector<Segment> segment_episode(int episode_length, int window);

// The segment a timestep's [t-N, t] window is sliced from: the latest one
// containing it, k = (t - N) / N.
int segment_for_timestep(int timestep, int window);

// Runs track_grid once per segment, then for each timestep t >= N slices
// the owning segment's trajectories to [t-N, t], filters by kappa, samples
// M traces with seed derive_seed(cfg.seed, fnv1a64(episode.id), t), and
// renders the overlay on frame t. Dropout is a separate pass.
AnnotateResult annotate_episode(const Episode& episode,
                                const TraceConfig& trace_cfg,
                                const TrackerConfig& tracker_cfg,
                                const OverlayStyle& style);

// Independently per step, marks dropped=true with probability dropout_prob
// using a splitmix64 stream seeded by derive_seed(seed, timestep).
std::vector<StepAnnotation> apply_dropout(std::vector<StepAnnotation> steps,
                                          double dropout_prob,
                                          std::uint64_t seed);

}  // namespace vtrace
