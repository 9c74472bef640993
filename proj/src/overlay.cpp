#include "vtrace/overlay.hpp"

#include <cmath>
#include <cstdint>

#include "vtrace/error.hpp"

namespace vtrace {

std::string OverlayStyle::check() const {
  if (linewidth < 1) return "linewidth must be at least 1";
  if (!(alpha >= 0.0 && alpha <= 1.0)) return "alpha must be in [0, 1]";
  if (palette.empty()) return "palette must not be empty";
  if (endpoint_radius < 0) return "endpoint radius must be non-negative";
  return {};
}

Rgb palette_color(int index, const std::vector<Rgb>& palette) {
  if (palette.empty()) throw validation_error("palette must not be empty");
  if (index < 0) throw validation_error("palette index must be non-negative");
  return palette[static_cast<std::size_t>(index) % palette.size()];
}

namespace {

// Rounds a coordinate to the nearest half pixel. Half-integer inputs stay
// put; ties round up, matching floor(2x + 0.5) / 2.
double half_pixel(double v) { return std::floor(2.0 * v + 0.5) / 2.0; }

// Marks every pixel whose center lies within radius of (cx, cy). Radius and
// centers are half-integers, so the comparison is exact in doubles.
void stamp_disc(std::vector<std::uint8_t>& mask, int width, int height,
                double cx, double cy, double radius) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(cx + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(cy + radius)));
  const double r2 = radius * radius;
  for (int iy = y0; iy <= y1; ++iy) {
    const double dy = iy - cy;
    for (int ix = x0; ix <= x1; ++ix) {
      const double dx = ix - cx;
      if (dx * dx + dy * dy <= r2) {
        mask[static_cast<std::size_t>(iy) * width + ix] = 1;
      }
    }
  }
}

// Stamps discs every 0.5 px along the segment from a to b, then once at b.
void stamp_segment(std::vector<std::uint8_t>& mask, int width, int height,
                   Vec2 a, Vec2 b, double radius) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::sqrt(dx * dx + dy * dy);
  const int steps = static_cast<int>(std::floor(len / 0.5));
  for (int s = 0; s <= steps; ++s) {
    const double t = len > 0.0 ? (0.5 * s) / len : 0.0;
    stamp_disc(mask, width, height, a.x + t * dx, a.y + t * dy, radius);
  }
  stamp_disc(mask, width, height, b.x, b.y, radius);
}

std::uint8_t blend(double alpha, std::uint8_t color, std::uint8_t under) {
  const double v = alpha * color + (1.0 - alpha) * under;
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
}

}  // namespace

Frame render_overlay(const Frame& frame, const TraceSet& traces,
                     const OverlayStyle& style) {
  if (auto msg = style.check(); !msg.empty()) throw validation_error(msg);
  if (frame.pixels.size() != frame.expected_bytes()) {
    throw validation_error("pixel buffer size mismatch");
  }

  Frame out = frame;
  const int w = frame.width;
  const int h = frame.height;
  const double stroke_r = style.linewidth / 2.0;

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h);
  for (std::size_t ti = 0; ti < traces.traces.size(); ++ti) {
    const auto& pts = traces.traces[ti].points;
    if (pts.empty()) continue;

    std::fill(mask.begin(), mask.end(), 0);
    std::vector<Vec2> verts(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      verts[i] = {half_pixel(pts[i].x), half_pixel(pts[i].y)};
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      stamp_segment(mask, w, h, verts[i], verts[i + 1], stroke_r);
    }
    if (verts.size() == 1) stamp_disc(mask, w, h, verts[0].x, verts[0].y, stroke_r);
    stamp_disc(mask, w, h, verts.back().x, verts.back().y,
               static_cast<double>(style.endpoint_radius));

    const Rgb c = palette_color(static_cast<int>(ti), style.palette);
    for (int iy = 0; iy < h; ++iy) {
      for (int ix = 0; ix < w; ++ix) {
        if (!mask[static_cast<std::size_t>(iy) * w + ix]) continue;
        const std::size_t o =
            (static_cast<std::size_t>(iy) * w + ix) * 3;
        out.pixels[o + 0] = blend(style.alpha, c.r, out.pixels[o + 0]);
        out.pixels[o + 1] = blend(style.alpha, c.g, out.pixels[o + 1]);
        out.pixels[o + 2] = blend(style.alpha, c.b, out.pixels[o + 2]);
      }
    }
  }
  return out;
}

}  // namespace vtrace
