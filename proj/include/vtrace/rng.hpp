#pragma once

#include <cstdint>
#include <string_view>

namespace vtrace {

// splitmix64: the fixed PRNG behind every randomized choice in the pipeline
// (trace sampling, dropout). Small state, trivially portable, and the output
// function doubles as a good integer mixer.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, bound). bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

// One splitmix64 step applied to an explicit state value.
inline std::uint64_t splitmix64_output(std::uint64_t state) {
  return SplitMix64(state).next();
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Deterministic sub-seed derivation: fold each part into the base with one
// splitmix64 step. Used for per-timestep sampling and dropout streams so
// that re-annotating one episode never perturbs another.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t part) {
  return splitmix64_output(base ^ part);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}

}  // namespace vtrace
