#include "vtrace/annotate.hpp"

#include <span>

#include "vtrace/error.hpp"
#include "vtrace/rng.hpp"
#include "vtrace/trace.hpp"

namespace vtrace {

std::vector<Segment> segment_episode(int episode_length, int window) {
  if (episode_length < 2) throw validation_error("episode must have at least 2 frames");
  if (window < 1) throw validation_error("window must be at least 1");
  std::vector<Segment> segments;
  for (int k = 0;; ++k) {
    const int start = k * window;
    if (k > 0 && start + window >= episode_length) break;
    segments.push_back({start, std::min(start + 2 * window, episode_length)});
  }
  return segments;
}

int segment_for_timestep(int timestep, int window) {
  if (timestep < window) throw validation_error("timestep has insufficient history");
  return (timestep - window) / window;
}

namespace {

// Slice of one grid trajectory covering local indices [lo, hi].
PointTrajectory slice_trajectory(const PointTrajectory& traj, int lo, int hi) {
  PointTrajectory out;
  out.origin = traj.origin;
  out.points.assign(traj.points.begin() + lo, traj.points.begin() + hi + 1);
  out.valid.assign(traj.valid.begin() + lo, traj.valid.begin() + hi + 1);
  return out;
}

}  // namespace

AnnotateResult annotate_episode(const Episode& episode,
                                const TraceConfig& trace_cfg,
                                const TrackerConfig& tracker_cfg,
                                const OverlayStyle& style) {
  if (auto msg = trace_cfg.check(); !msg.empty()) throw validation_error(msg);
  if (auto msg = tracker_cfg.check(); !msg.empty()) throw validation_error(msg);
  if (auto msg = style.check(); !msg.empty()) throw validation_error(msg);
  if (auto report = validate_episode(episode); !report.ok()) {
    throw validation_error(report.violations.front());
  }
  const int T = episode.length();
  if (T < 2) throw validation_error("episode must have at least 2 frames");

  const int N = trace_cfg.window;
  const auto segments = segment_episode(T, N);

  // One dense grid track per segment; timesteps slice into these.
  std::vector<std::vector<PointTrajectory>> tracked(segments.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    tracked[s] = track_grid(
        std::span<const Frame>(episode.frames.data() + seg.start,
                               static_cast<std::size_t>(seg.end - seg.start)),
        trace_cfg.grid_size, tracker_cfg);
  }

  const std::uint64_t episode_hash = fnv1a64(episode.id);
  AnnotateResult result;
  result.dense_calls = static_cast<int>(segments.size());
  result.steps.resize(static_cast<std::size_t>(T));

  for (int t = 0; t < T; ++t) {
    StepAnnotation& step = result.steps[static_cast<std::size_t>(t)];
    step.timestep = t;
    if (t < N) {
      step.history_len = t;
      continue;
    }
    step.history_len = N;

    const int k = segment_for_timestep(t, N);
    const auto& seg = segments[static_cast<std::size_t>(k)];
    const int lo = t - N - seg.start;
    const int hi = t - seg.start;

    std::vector<PointTrajectory> window_trajs;
    window_trajs.reserve(tracked[static_cast<std::size_t>(k)].size());
    for (const auto& traj : tracked[static_cast<std::size_t>(k)]) {
      window_trajs.push_back(slice_trajectory(traj, lo, hi));
    }

    const ActiveSet active = filter_active(window_trajs, trace_cfg.kappa);
    const std::uint64_t step_seed =
        derive_seed(trace_cfg.seed, episode_hash, static_cast<std::uint64_t>(t));
    step.trace = sample_traces(active, trace_cfg.sample_count, step_seed, t - N);
    step.overlaid =
        render_overlay(episode.frames[static_cast<std::size_t>(t)], *step.trace, style);
  }
  return result;
}

std::vector<StepAnnotation> apply_dropout(std::vector<StepAnnotation> steps,
                                          double dropout_prob,
                                          std::uint64_t seed) {
  if (!(dropout_prob >= 0.0 && dropout_prob <= 1.0)) {
    throw validation_error("dropout probability must be in [0, 1]");
  }
  for (auto& step : steps) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(step.timestep)));
    step.dropped = rng.next_double() < dropout_prob;
  }
  return steps;
}

}  // namespace vtrace
