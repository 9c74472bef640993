#include "vtrace/stream.hpp"

#include "vtrace/error.hpp"
#include "vtrace/rng.hpp"
#include "vtrace/trace.hpp"

namespace vtrace {

StreamState::StreamState(const TraceConfig& trace_cfg,
                         const TrackerConfig& tracker_cfg,
                         const OverlayStyle& style)
    : trace_cfg_(trace_cfg), tracker_cfg_(tracker_cfg), style_(style) {
  if (auto msg = trace_cfg_.check(); !msg.empty()) throw validation_error(msg);
  if (auto msg = tracker_cfg_.check(); !msg.empty()) throw validation_error(msg);
  if (auto msg = style_.check(); !msg.empty()) throw validation_error(msg);
}

namespace {

std::vector<Pyramid> queue_pyramids(const std::deque<Pyramid>& queue) {
  return {queue.begin(), queue.end()};
}

}  // namespace

TraceSet StreamState::recalibrate(int now) {
  const auto pyramids = queue_pyramids(pyramids_);
  const int w = frames_.back().width;
  const int h = frames_.back().height;
  auto grid = track_grid(pyramids, w, h, trace_cfg_.grid_size, tracker_cfg_);
  const ActiveSet active = filter_active(grid, trace_cfg_.kappa);
  return sample_traces(active, trace_cfg_.sample_count,
                       derive_seed(trace_cfg_.seed, static_cast<std::uint64_t>(now)),
                       now - trace_cfg_.window);
}

// Re-tracks each kept trace over the whole queue, starting from its position
// at the queue's first frame. Traces that stop tracking are dropped.
TraceSet StreamState::advance(int now) {
  const auto pyramids = queue_pyramids(pyramids_);
  std::vector<Vec2> queries(traces_.size());
  for (std::size_t i = 0; i < traces_.size(); ++i) {
    queries[i] = traces_[i].points[1];
  }
  auto retracked = track_points(pyramids, queries, tracker_cfg_);

  TraceSet out;
  out.window_start = now - trace_cfg_.window;
  out.window_end = now;
  for (std::size_t i = 0; i < retracked.size(); ++i) {
    if (!retracked[i].fully_valid()) continue;
    retracked[i].origin = traces_[i].origin;
    out.traces.push_back(std::move(retracked[i]));
  }
  return out;
}

StreamResult StreamState::step(const Frame& frame) {
  if (frame.pixels.size() != frame.expected_bytes()) {
    throw validation_error("pixel buffer size mismatch");
  }
  if (!frames_.empty() && (frame.width != frames_.front().width ||
                           frame.height != frames_.front().height)) {
    throw validation_error("frame size mismatch");
  }

  frames_.push_back(frame);
  pyramids_.push_back(build_pyramid(frame, tracker_cfg_));
  const std::size_t cap = static_cast<std::size_t>(trace_cfg_.window) + 1;
  while (frames_.size() > cap) {
    frames_.pop_front();
    pyramids_.pop_front();
  }

  const int now = t_++;
  const int N = trace_cfg_.window;
  if (now < N) return {};

  if (now == N || (now - N) % trace_cfg_.redraw_steps == 0) {
    ++dense_calls_;
    last_dense_at_ = now;
    TraceSet ts = recalibrate(now);
    traces_ = ts.traces;
    if (ts.empty()) return {};
    return {ts, render_overlay(frames_.back(), ts, style_)};
  }

  if (traces_.empty()) return {};
  TraceSet ts = advance(now);
  traces_ = ts.traces;
  if (ts.empty()) return {};
  return {ts, render_overlay(frames_.back(), ts, style_)};
}

}  // namespace vtrace
