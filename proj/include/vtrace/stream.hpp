#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "vtrace/core.hpp"
#include "vtrace/overlay.hpp"
#include "vtrace/tracker.hpp"

namespace vtrace {

struct StreamResult {
  std::optional<TraceSet> trace;
  std::optional<Frame> overlaid;
};

// Online trace extraction. Holds the last N+1 frames; runs a dense grid
// recalibration at t == N and every redraw_steps after, and in between
// re-tracks the sampled points over the queued frames. Outputs are absent
// during warm-up (t < N) and while no motion is found.
class StreamState {
 public:
  StreamState(const TraceConfig& trace_cfg, const TrackerConfig& tracker_cfg,
              const OverlayStyle& style = {});

  // Consumes one frame and advances t. Returns the trace over the queued
  // window and the overlay on the newest frame, or absent per the rules
  // above.
  StreamResult step(const Frame& frame);

  int t() const { return t_; }
  int dense_calls() const { return dense_calls_; }
  std::optional<int> last_dense_at() const { return last_dense_at_; }
  bool tracking() const { return !traces_.empty(); }

 private:
  TraceSet recalibrate(int now);
  TraceSet advance(int now);

  TraceConfig trace_cfg_;
  TrackerConfig tracker_cfg_;
  OverlayStyle style_;
  int t_ = 0;
  std::deque<Frame> frames_;
  std::deque<Pyramid> pyramids_;
  std::vector<PointTrajectory> traces_;  // windows over the current queue
  std::optional<int> last_dense_at_;
  int dense_calls_ = 0;
};

}  // namespace vtrace
