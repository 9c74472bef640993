#include <doctest.h>

#include <algorithm>
#include <map>

#include "helpers.hpp"
#include "vtrace/error.hpp"
#include "vtrace/trace.hpp"

using namespace vtrace;

namespace {

PointTrajectory make_traj(std::vector<Vec2> points, int origin = 0) {
  PointTrajectory tr;
  tr.points = std::move(points);
  tr.valid.assign(tr.points.size(), 1);
  tr.origin = origin;
  return tr;
}

// count trajectories stepping (+step,0) per frame, 7 frames, distinct origins
std::vector<PointTrajectory> moving_set(int count, double step) {
  std::vector<PointTrajectory> out;
  for (int i = 0; i < count; ++i) {
    std::vector<Vec2> pts;
    for (int t = 0; t < 7; ++t)
      pts.push_back({10.0 + i + step * t, 20.0 + i});
    out.push_back(make_traj(std::move(pts), i));
  }
  return out;
}

}  // namespace

TEST_CASE("trajectory movement sums l1 steps") {
  CHECK(trajectory_movement(make_traj({{0, 0}, {1, 0}, {1, 1}})) == 2.0);

  std::vector<Vec2> stepping;
  for (int t = 0; t < 7; ++t) stepping.push_back({2.0 * t, 0.0});
  CHECK(trajectory_movement(make_traj(std::move(stepping))) == 12.0);

  CHECK(trajectory_movement(make_traj({{3, 4}, {3, 4}, {3, 4}, {3, 4}})) == 0.0);

  CHECK_THROWS_WITH_AS(trajectory_movement(make_traj({{1, 1}})),
                       "trajectory movement needs at least 2 points", Error);
}

TEST_CASE("filter keeps only fully valid movers above kappa, in order") {
  auto trajs = moving_set(6, 1.0);  // movement 6.0 each

  SUBCASE("static set is filtered out entirely") {
    auto statics = moving_set(1600, 0.0);
    const ActiveSet active = filter_active(statics, 2.0);
    CHECK(active.trajectories.empty());
    CHECK(active.total_input == 1600);
    CHECK(active.kappa == 2.0);
  }

  SUBCASE("strict inequality at the threshold") {
    const ActiveSet at2 = filter_active(trajs, 2.0);
    CHECK(at2.trajectories.size() == 6);
    const ActiveSet at6 = filter_active(trajs, 6.0);
    CHECK(at6.trajectories.empty());
  }

  SUBCASE("invalid step excludes a trajectory regardless of movement") {
    trajs[3].valid[4] = 0;
    const ActiveSet active = filter_active(trajs, 2.0);
    CHECK(active.trajectories.size() == 5);
    for (const auto& tr : active.trajectories) CHECK(tr.origin != 3);
  }

  SUBCASE("input order is preserved") {
    const ActiveSet active = filter_active(trajs, 2.0);
    for (std::size_t i = 1; i < active.trajectories.size(); ++i) {
      CHECK(active.trajectories[i - 1].origin < active.trajectories[i].origin);
    }
  }

  SUBCASE("negative kappa is rejected") {
    CHECK_THROWS_WITH_AS(filter_active(trajs, -1.0), "kappa must be >= 0",
                         Error);
  }
}

TEST_CASE("kappa monotonicity and subset law") {
  // Mixed movements 0..11 over random-ish offsets.
  std::vector<PointTrajectory> trajs;
  for (int i = 0; i < 12; ++i) {
    std::vector<Vec2> pts;
    for (int t = 0; t < 4; ++t)
      pts.push_back({1.0 * i * t / 3.0, 0.0});
    trajs.push_back(make_traj(std::move(pts), i));
  }

  std::size_t prev_size = trajs.size() + 1;
  for (double kappa : {0.0, 1.0, 3.0, 5.0, 8.0, 100.0}) {
    const ActiveSet active = filter_active(trajs, kappa);
    CHECK(active.trajectories.size() <= prev_size);
    prev_size = active.trajectories.size();
    for (const auto& tr : active.trajectories) {
      CHECK(trajectory_movement(tr) > kappa);
    }
  }

  // Subset law: members of the active set at larger kappa are members at
  // smaller kappa.
  const ActiveSet loose = filter_active(trajs, 1.0);
  const ActiveSet tight = filter_active(trajs, 5.0);
  for (const auto& tr : tight.trajectories) {
    bool found = false;
    for (const auto& other : loose.trajectories) found |= other.origin == tr.origin;
    CHECK(found);
  }
}

TEST_CASE("sampling returns everything when the active set is small") {
  auto trajs = moving_set(4, 1.0);
  ActiveSet active = filter_active(trajs, 0.0);
  const TraceSet set = sample_traces(active, 5, 999, 10);
  REQUIRE(set.traces.size() == 4);
  CHECK(set.window_start == 10);
  CHECK(set.window_end == 16);
  for (int i = 0; i < 4; ++i) CHECK(set.traces[i].origin == i);
}

TEST_CASE("sampling picks exactly M distinct members in input order") {
  auto trajs = moving_set(40, 1.0);
  ActiveSet active = filter_active(trajs, 0.0);
  const TraceSet set = sample_traces(active, 5, 42, 0);
  REQUIRE(set.traces.size() == 5);
  for (std::size_t i = 1; i < set.traces.size(); ++i) {
    CHECK(set.traces[i - 1].origin < set.traces[i].origin);
  }
}

TEST_CASE("sampling is deterministic per seed and varies across seeds") {
  auto trajs = moving_set(40, 1.0);
  ActiveSet active = filter_active(trajs, 0.0);

  const TraceSet a = sample_traces(active, 5, 7, 0);
  const TraceSet b = sample_traces(active, 5, 7, 0);
  REQUIRE(a.traces.size() == b.traces.size());
  for (std::size_t i = 0; i < a.traces.size(); ++i) {
    CHECK(a.traces[i].origin == b.traces[i].origin);
  }

  bool any_differs = false;
  const auto origins = [](const TraceSet& s) {
    std::vector<int> o;
    for (const auto& tr : s.traces) o.push_back(tr.origin);
    return o;
  };
  for (std::uint64_t seed = 0; seed < 20 && !any_differs; ++seed) {
    any_differs = origins(sample_traces(active, 5, seed, 0)) != origins(a);
  }
  CHECK(any_differs);
}

TEST_CASE("sampling is uniform across the active set") {
  auto trajs = moving_set(12, 1.0);
  ActiveSet active = filter_active(trajs, 0.0);
  const int seeds = 20000;
  const int m = 5;
  std::map<int, int> hits;
  for (int seed = 0; seed < seeds; ++seed) {
    const TraceSet set =
        sample_traces(active, m, static_cast<std::uint64_t>(seed), 0);
    for (const auto& tr : set.traces) ++hits[tr.origin];
  }
  const double expected = static_cast<double>(m) / 12.0;
  for (int i = 0; i < 12; ++i) {
    const double freq = static_cast<double>(hits[i]) / seeds;
    CHECK(std::abs(freq - expected) < 0.02);
  }
}
