#include <doctest.h>

#include "helpers.hpp"
#include "vtrace/core.hpp"
#include "vtrace/rng.hpp"

using namespace vtrace;

TEST_CASE("splitmix64 matches the published sequence from seed 0") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xe220a8397b1dcdafull);
  CHECK(rng.next() == 0x6e789e6aa1b965f4ull);
  CHECK(rng.next() == 0x06c45d188009454full);
}

TEST_CASE("splitmix64 doubles lie in [0,1) and are reproducible") {
  SplitMix64 a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    const double v = a.next_double();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    CHECK(v == b.next_double());
  }
}

TEST_CASE("fnv1a64 matches the reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("derive_seed differs per part and is order-sensitive") {
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(7, 9) == derive_seed(7, 9));
}

TEST_CASE("default TraceConfig is valid and hits the production values") {
  TraceConfig cfg;
  CHECK(cfg.check().empty());
  CHECK(cfg.grid_size == 40);
  CHECK(cfg.sample_count == 5);
  CHECK(cfg.window == 6);
  CHECK(cfg.kappa == 2.0);
  CHECK(cfg.dropout_prob == 0.1);
  CHECK(cfg.redraw_steps == 20);
}

TEST_CASE("TraceConfig rejects each invariant violation") {
  TraceConfig cfg;
  cfg.grid_size = 1;
  CHECK(!cfg.check().empty());

  cfg = TraceConfig{};
  cfg.sample_count = 0;
  CHECK(!cfg.check().empty());

  cfg = TraceConfig{};
  cfg.window = 0;
  CHECK(!cfg.check().empty());

  cfg = TraceConfig{};
  cfg.kappa = -0.5;
  CHECK(!cfg.check().empty());

  cfg = TraceConfig{};
  cfg.dropout_prob = 1.5;
  CHECK(!cfg.check().empty());

  cfg = TraceConfig{};
  cfg.redraw_steps = 0;
  CHECK(!cfg.check().empty());

  cfg = TraceConfig{};
  cfg.grid_size = 2;
  cfg.sample_count = 5;  // 5 > 2*2
  CHECK(cfg.check() == "sample_count must be <= grid_size^2");
}

TEST_CASE("validate_episode accepts a well-formed episode") {
  const Episode ep = vtest::make_episode(64, 48, 4, 1, 0, 11);
  CHECK(validate_episode(ep).ok());
}

TEST_CASE("validate_episode reports each violation class") {
  SUBCASE("no frames") {
    Episode ep;
    const auto report = validate_episode(ep);
    REQUIRE(!report.ok());
    CHECK(report.violations.front() == "episode has no frames");
  }

  SUBCASE("frame size mismatch") {
    Episode ep = vtest::make_episode(64, 48, 4, 1, 0, 11);
    ep.frames[2] = make_noise_frame(48, 48, 3);
    const auto report = validate_episode(ep);
    bool found = false;
    for (const auto& v : report.violations) found |= v == "frame size mismatch";
    CHECK(found);
  }

  SUBCASE("undersized frame") {
    Episode ep = vtest::make_episode(16, 16, 2, 0, 0, 11);
    const auto report = validate_episode(ep);
    bool found = false;
    for (const auto& v : report.violations) found |= v == "undersized frame";
    CHECK(found);
  }

  SUBCASE("pixel buffer size mismatch") {
    Episode ep = vtest::make_episode(64, 48, 4, 1, 0, 11);
    ep.frames[1].pixels.pop_back();
    const auto report = validate_episode(ep);
    bool found = false;
    for (const auto& v : report.violations)
      found |= v == "pixel buffer size mismatch";
    CHECK(found);
  }

  SUBCASE("action/frame length mismatch") {
    Episode ep = vtest::make_episode(64, 48, 4, 1, 0, 11);
    ep.actions.pop_back();
    const auto report = validate_episode(ep);
    bool found = false;
    for (const auto& v : report.violations)
      found |= v == "action/frame length mismatch";
    CHECK(found);
  }

  SUBCASE("action dimension mismatch") {
    Episode ep = vtest::make_episode(64, 48, 4, 1, 0, 11);
    ep.actions[3].push_back(0.0);
    const auto report = validate_episode(ep);
    bool found = false;
    for (const auto& v : report.violations)
      found |= v == "action dimension mismatch";
    CHECK(found);
  }
}
