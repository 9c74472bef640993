#pragma once

#include <cstdint>
#include <vector>

#include "vtrace/core.hpp"

namespace vtrace {

// Smoothed random RGB noise: dense gradients everywhere, so every interior
// point is trackable. blur_passes 3x3 box blurs tame the high frequencies
// enough for a gradient-based tracker to converge.
Frame make_noise_frame(int width, int height, std::uint64_t seed,
                       int blur_passes = 2);

// Torus shift: output(x, y) = input((x - dx) mod w, (y - dy) mod h), i.e.
// the content moves by exactly (dx, dy) with wrap-around.
Frame cyclic_shift(const Frame& frame, int dx, int dy);

// T frames of one noise image rigidly translating by (dx, dy) per step.
std::vector<Frame> make_translating_sequence(int width, int height, int count,
                                             int dx, int dy,
                                             std::uint64_t seed);

}  // namespace vtrace
