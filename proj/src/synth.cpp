#include "vtrace/synth.hpp"

#include <algorithm>

#include "vtrace/error.hpp"
#include "vtrace/rng.hpp"

namespace vtrace {

namespace {

Frame box_blur(const Frame& in) {
  Frame out = in;
  const int w = in.width;
  const int h = in.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        int sum = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          const int yy = std::clamp(y + dy, 0, h - 1);
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = std::clamp(x + dx, 0, w - 1);
            sum += in.pixels[(static_cast<std::size_t>(yy) * w + xx) * 3 + c];
          }
        }
        out.pixels[(static_cast<std::size_t>(y) * w + x) * 3 + c] =
            static_cast<std::uint8_t>(sum / 9);
      }
    }
  }
  return out;
}

}  // namespace

Frame make_noise_frame(int width, int height, std::uint64_t seed,
                       int blur_passes) {
  if (width < 1 || height < 1) throw validation_error("frame must be non-empty");
  Frame frame;
  frame.width = width;
  frame.height = height;
  frame.pixels.resize(frame.expected_bytes());
  SplitMix64 rng(seed);
  for (auto& byte : frame.pixels) {
    byte = static_cast<std::uint8_t>(rng.next() & 0xff);
  }
  for (int i = 0; i < blur_passes; ++i) frame = box_blur(frame);
  return frame;
}

Frame cyclic_shift(const Frame& frame, int dx, int dy) {
  Frame out = frame;
  const int w = frame.width;
  const int h = frame.height;
  const auto wrap = [](int v, int m) { return ((v % m) + m) % m; };
  for (int y = 0; y < h; ++y) {
    const int sy = wrap(y - dy, h);
    for (int x = 0; x < w; ++x) {
      const int sx = wrap(x - dx, w);
      const std::size_t src = (static_cast<std::size_t>(sy) * w + sx) * 3;
      const std::size_t dst = (static_cast<std::size_t>(y) * w + x) * 3;
      out.pixels[dst + 0] = frame.pixels[src + 0];
      out.pixels[dst + 1] = frame.pixels[src + 1];
      out.pixels[dst + 2] = frame.pixels[src + 2];
    }
  }
  return out;
}

std::vector<Frame> make_translating_sequence(int width, int height, int count,
                                             int dx, int dy,
                                             std::uint64_t seed) {
  if (count < 1) throw validation_error("sequence must be non-empty");
  const Frame base = make_noise_frame(width, height, seed);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    Frame f = cyclic_shift(base, t * dx, t * dy);
    f.index = t;
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace vtrace
