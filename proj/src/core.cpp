#include "vtrace/core.hpp"

#include <string>

namespace vtrace {

std::string TraceConfig::check() const {
  if (grid_size < 2) return "grid_size must be >= 2";
  if (sample_count < 1) return "sample_count must be >= 1";
  if (window < 1) return "window must be >= 1";
  if (kappa < 0.0) return "kappa must be >= 0";
  if (redraw_steps < 1) return "redraw_steps must be >= 1";
  if (dropout_prob < 0.0 || dropout_prob > 1.0)
    return "dropout_prob must be in [0, 1]";
  if (static_cast<long long>(sample_count) >
      static_cast<long long>(grid_size) * grid_size)
    return "sample_count must be <= grid_size^2";
  return {};
}

ValidationReport validate_episode(const Episode& episode) {
  ValidationReport report;
  auto add = [&report](std::string v) {
    report.violations.push_back(std::move(v));
  };

  if (episode.frames.empty()) {
    add("episode has no frames");
  } else {
    const int w = episode.frames.front().width;
    const int h = episode.frames.front().height;
    bool size_mismatch = false;
    bool undersized = false;
    bool bad_buffer = false;
    for (const Frame& f : episode.frames) {
      if (f.width != w || f.height != h) size_mismatch = true;
      if (f.width < Frame::kMinSide || f.height < Frame::kMinSide)
        undersized = true;
      if (f.pixels.size() != f.expected_bytes()) bad_buffer = true;
    }
    if (size_mismatch) add("frame size mismatch");
    if (undersized) add("undersized frame");
    if (bad_buffer) add("pixel buffer size mismatch");
  }

  if (episode.actions.size() != episode.frames.size()) {
    add("action/frame length mismatch");
  }
  if (!episode.actions.empty()) {
    const std::size_t dim = episode.actions.front().size();
    for (const auto& a : episode.actions) {
      if (a.size() != dim) {
        add("action dimension mismatch");
        break;
      }
    }
  }
  return report;
}

}  // namespace vtrace
