#pragma once

#include "vtrace/core.hpp"
#include "vtrace/tracker.hpp"

namespace vtrace {

struct IVec2 {
  int x = 0;
  int y = 0;
  friend bool operator==(const IVec2&, const IVec2&) = default;
};

// Exhaustive integer-displacement block match minimizing the sum of absolute
// luminance differences over a (2*window_half+1)^2 window. Ties go to the
// smallest l1 displacement, then smaller dy, then smaller dx. Serves as the
// independent motion oracle for the LK tracker.
IVec2 oracle_displacement(const GrayImage& prev, const GrayImage& next,
                          IVec2 p, int search_radius, int window_half);

// Frame-level convenience: returns the matched point p + displacement.
Vec2 oracle_track_point(const Frame& prev, const Frame& next, IVec2 p,
                        int search_radius, int window_half = 5);

}  // namespace vtrace
