#include "vtrace/oracle.hpp"

#include <cmath>
#include <cstdlib>

#include "vtrace/error.hpp"

namespace vtrace {

IVec2 oracle_displacement(const GrayImage& prev, const GrayImage& next,
                          IVec2 p, int search_radius, int window_half) {
  const int wh = window_half;
  const int r = search_radius;
  if (p.x - wh - r < 0 || p.y - wh - r < 0 || p.x + wh + r >= prev.width ||
      p.y + wh + r >= prev.height || prev.width != next.width ||
      prev.height != next.height) {
    throw validation_error("oracle window cannot fit inside the frames");
  }

  double best_sad = 0.0;
  IVec2 best{0, 0};
  bool first = true;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      double sad = 0.0;
      for (int j = -wh; j <= wh; ++j) {
        for (int i = -wh; i <= wh; ++i) {
          sad += std::abs(prev.at(p.x + i, p.y + j) -
                          next.at(p.x + dx + i, p.y + dy + j));
        }
      }
      const int l1 = std::abs(dx) + std::abs(dy);
      const int best_l1 = std::abs(best.x) + std::abs(best.y);
      const bool better =
          first || sad < best_sad ||
          (sad == best_sad &&
           (l1 < best_l1 ||
            (l1 == best_l1 && (dy < best.y || (dy == best.y && dx < best.x)))));
      if (better) {
        best_sad = sad;
        best = {dx, dy};
        first = false;
      }
    }
  }
  return best;
}

Vec2 oracle_track_point(const Frame& prev, const Frame& next, IVec2 p,
                        int search_radius, int window_half) {
  const GrayImage a = to_luminance(prev);
  const GrayImage b = to_luminance(next);
  const IVec2 d = oracle_displacement(a, b, p, search_radius, window_half);
  return {static_cast<double>(p.x + d.x), static_cast<double>(p.y + d.y)};
}

}  // namespace vtrace
