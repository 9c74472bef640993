#include "vtrace/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <span>
#include <vector>

#include "vtrace/parallel.hpp"
#include "vtrace/stream.hpp"
#include "vtrace/synth.hpp"
#include "vtrace/tracker.hpp"

namespace vtrace {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

}  // namespace

BenchReport run_benchmark(int sparse_steps, int dense_repeats) {
  const TraceConfig trace_cfg;
  const TrackerConfig tracker_cfg;
  const int N = trace_cfg.window;

  // Enough frames to warm up, recalibrate once, and then time sparse steps
  // without hitting the next recalibration.
  const int total = N + 1 + sparse_steps;
  const auto frames = make_translating_sequence(256, 256, total, 1, 1, 7);

  BenchReport report;
  report.threads = worker_threads();

  StreamState state(trace_cfg, tracker_cfg);
  std::vector<double> sparse_ms;
  for (int t = 0; t < total; ++t) {
    const bool sparse = t > N && (t - N) % trace_cfg.redraw_steps != 0;
    const auto start = Clock::now();
    state.step(frames[static_cast<std::size_t>(t)]);
    if (sparse && state.tracking()) sparse_ms.push_back(ms_since(start));
  }
  if (!sparse_ms.empty()) report.sparse_median_ms = median(sparse_ms);

  const std::span<const Frame> window(frames.data(),
                                      static_cast<std::size_t>(N) + 1);
  std::vector<double> dense_ms;
  for (int i = 0; i < dense_repeats; ++i) {
    const auto start = Clock::now();
    track_grid(window, trace_cfg.grid_size, tracker_cfg);
    dense_ms.push_back(ms_since(start));
  }
  report.dense_median_ms = median(dense_ms);

  const auto pyramids = build_pyramids(window, tracker_cfg);
  const auto queries = grid_queries(256, 256, trace_cfg.grid_size);
  const auto start = Clock::now();
  track_points_serial(pyramids, queries, tracker_cfg);
  report.dense_serial_ms = ms_since(start);

  return report;
}

std::string format_bench_report(const BenchReport& report) {
  char buf[512];
  std::snprintf(
      buf, sizeof(buf),
      "threads: %d\n"
      "sparse stream step: %.2f ms median (budget %.0f ms) %s\n"
      "dense %dx%d grid over %d frames: %.2f ms median (budget %.0f ms) %s\n"
      "dense serial reference: %.2f ms (parallel speedup %.2fx)\n",
      report.threads, report.sparse_median_ms, BenchReport::kSparseBudgetMs,
      report.sparse_soft_ok() ? "ok" : "over budget", 40, 40, 7,
      report.dense_median_ms, BenchReport::kDenseBudgetMs,
      report.dense_soft_ok() ? "ok" : "over budget", report.dense_serial_ms,
      report.dense_median_ms > 0.0
          ? report.dense_serial_ms / report.dense_median_ms
          : 0.0);
  return buf;
}

}  // namespace vtrace
