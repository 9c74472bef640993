#pragma once

#include <string>

namespace vtrace {

// Timings for the two paths the performance budget covers: a sparse
// streaming step (M tracked points over the N+1 frame queue) and one dense
// K x K grid track over N+1 frames. Budgets are milliseconds; the hard
// ceiling is twice the soft budget.
struct BenchReport {
  double sparse_median_ms = 0.0;
  double dense_median_ms = 0.0;
  double dense_serial_ms = 0.0;  // serial reference driver on the same input
  int threads = 1;

  static constexpr double kSparseBudgetMs = 30.0;
  static constexpr double kDenseBudgetMs = 600.0;

  bool sparse_soft_ok() const { return sparse_median_ms <= kSparseBudgetMs; }
  bool dense_soft_ok() const { return dense_median_ms <= kDenseBudgetMs; }
  bool sparse_hard_ok() const { return sparse_median_ms <= 2 * kSparseBudgetMs; }
  bool dense_hard_ok() const { return dense_median_ms <= 2 * kDenseBudgetMs; }
};

// Runs the budget measurement on synthetic 256x256 input with the default
// pipeline configuration. sparse_steps sets how many sparse stream steps
// the median is taken over.
BenchReport run_benchmark(int sparse_steps = 30, int dense_repeats = 3);

std::string format_bench_report(const BenchReport& report);

}  // namespace vtrace
