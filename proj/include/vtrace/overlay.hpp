#pragma once

#include <array>
#include <vector>

#include "vtrace/core.hpp"

namespace vtrace {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Trace rendering style. The default palette is red, yellow, purple, blue,
// green, cycled per trace index.
struct OverlayStyle {
  int linewidth = 2;        // stroke diameter, pixels
  double alpha = 1.0;       // trace opacity
  std::vector<Rgb> palette = default_palette();
  int endpoint_radius = 3;  // filled marker at the trace's final position

  static std::vector<Rgb> default_palette() {
    return {{255, 0, 0}, {255, 255, 0}, {160, 32, 240}, {0, 0, 255}, {0, 200, 0}};
  }

  std::string check() const;
};

Rgb palette_color(int index, const std::vector<Rgb>& palette);

// Renders the traces onto a copy of the frame: per trace, a polyline stroked
// by stamping filled discs of diameter linewidth at half-pixel steps along
// each segment (vertices rounded to half-pixels first), plus an endpoint
// disc. Each trace's coverage is composited once: out = alpha*color +
// (1-alpha)*under, later traces over earlier ones. Byte-exact and pure.
Frame render_overlay(const Frame& frame, const TraceSet& traces,
                     const OverlayStyle& style);

}  // namespace vtrace
