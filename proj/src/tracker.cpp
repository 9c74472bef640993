#include "vtrace/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "vtrace/error.hpp"

namespace vtrace {

std::string TrackerConfig::check() const {
  if (pyramid_levels < 0) return "pyramid_levels must be >= 0";
  if (window_half < 2) return "window_half must be >= 2";
  if (max_iters < 1) return "max_iters must be >= 1";
  if (epsilon <= 0.0) return "epsilon must be > 0";
  if (min_eigen < 0.0) return "min_eigen must be >= 0";
  return {};
}

double GrayImage::sample(double x, double y) const {
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  // The +1 neighbors are clamped; at integral coordinates their weight is
  // exactly zero, so the clamp never changes the value.
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double v00 = at(x0, y0);
  const double v10 = at(x1, y0);
  const double v01 = at(x0, y1);
  const double v11 = at(x1, y1);
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) +
         fy * ((1.0 - fx) * v01 + fx * v11);
}

GrayImage to_luminance(const Frame& frame) {
  GrayImage g;
  g.width = frame.width;
  g.height = frame.height;
  g.data.resize(static_cast<std::size_t>(frame.width) * frame.height);
  const std::uint8_t* p = frame.pixels.data();
  for (std::size_t i = 0; i < g.data.size(); ++i, p += 3) {
    g.data[i] = 0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2];
  }
  return g;
}

namespace {

GrayImage box_downsample(const GrayImage& src) {
  GrayImage dst;
  dst.width = (src.width + 1) / 2;
  dst.height = (src.height + 1) / 2;
  dst.data.resize(static_cast<std::size_t>(dst.width) * dst.height);
  for (int y = 0; y < dst.height; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(2 * y + 1, src.height - 1);  // edge replication
    for (int x = 0; x < dst.width; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(2 * x + 1, src.width - 1);
      dst.at(x, y) = 0.25f * (src.at(x0, y0) + src.at(x1, y0) +
                              src.at(x0, y1) + src.at(x1, y1));
    }
  }
  return dst;
}

}  // namespace

Pyramid build_pyramid(GrayImage level0, const TrackerConfig& config) {
  Pyramid pyr;
  pyr.levels.reserve(config.pyramid_levels + 1);
  pyr.levels.push_back(std::move(level0));
  for (int l = 0; l < config.pyramid_levels; ++l) {
    pyr.levels.push_back(box_downsample(pyr.levels.back()));
  }
  const GrayImage& coarsest = pyr.levels.back();
  const int win = 2 * config.window_half + 1;
  if (coarsest.width < win || coarsest.height < win) {
    throw validation_error(
        "tracker window does not fit in the coarsest pyramid level");
  }
  return pyr;
}

Pyramid build_pyramid(const Frame& frame, const TrackerConfig& config) {
  return build_pyramid(to_luminance(frame), config);
}

std::vector<Pyramid> build_pyramids(std::span<const Frame> frames,
                                    const TrackerConfig& config) {
  std::vector<Pyramid> pyramids(frames.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(frames.size());
       ++i) {
    pyramids[i] = build_pyramid(frames[i], config);
  }
  return pyramids;
}

namespace {

// The previous-image window also feeds central differences, so its stencil
// is one pixel wider than the plain window needed on the next image.
bool window_fits(const GrayImage& img, double cx, double cy, int half,
                 int extra) {
  const double r = half + extra;
  return cx - r >= 0.0 && cy - r >= 0.0 && cx + r <= img.width - 1.0 &&
         cy + r <= img.height - 1.0;
}

}  // namespace

TrackResult track_point(const Pyramid& prev, const Pyramid& next, Vec2 p,
                        const TrackerConfig& config) {
  const int wh = config.window_half;
  const int side = 2 * wh + 1;
  const int win_pixels = side * side;

  std::vector<double> ref(win_pixels), gx(win_pixels), gy(win_pixels);

  Vec2 d{0.0, 0.0};
  for (int level = config.pyramid_levels; level >= 0; --level) {
    const GrayImage& I = prev.level(level);
    const GrayImage& J = next.level(level);
    const double scale = std::ldexp(1.0, -level);  // 1 / 2^level
    const double ux = p.x * scale;
    const double uy = p.y * scale;

    if (!window_fits(I, ux, uy, wh, 1)) {
      return {p, TrackStatus::out_of_bounds};
    }

    // Reference window and its central-difference gradients, sampled once
    // per level; only the moving window on J changes across iterations.
    double gxx = 0.0, gxy = 0.0, gyy = 0.0;
    int idx = 0;
    for (int j = -wh; j <= wh; ++j) {
      for (int i = -wh; i <= wh; ++i, ++idx) {
        const double sx = ux + i;
        const double sy = uy + j;
        ref[idx] = I.sample(sx, sy);
        const double ix = 0.5 * (I.sample(sx + 1.0, sy) - I.sample(sx - 1.0, sy));
        const double iy = 0.5 * (I.sample(sx, sy + 1.0) - I.sample(sx, sy - 1.0));
        gx[idx] = ix;
        gy[idx] = iy;
        gxx += ix * ix;
        gxy += ix * iy;
        gyy += iy * iy;
      }
    }

    if (level == 0) {
      const double tr = gxx + gyy;
      const double disc = std::sqrt((gxx - gyy) * (gxx - gyy) + 4.0 * gxy * gxy);
      const double min_eig = 0.5 * (tr - disc) / win_pixels;
      if (min_eig < config.min_eigen) {
        return {p, TrackStatus::lost};
      }
    }

    const double det = gxx * gyy - gxy * gxy;
    if (det > 0.0) {
      for (int iter = 0; iter < config.max_iters; ++iter) {
        const double qx = ux + d.x;
        const double qy = uy + d.y;
        if (!window_fits(J, qx, qy, wh, 0)) {
          return {p, TrackStatus::out_of_bounds};
        }
        double bx = 0.0, by = 0.0;
        idx = 0;
        for (int j = -wh; j <= wh; ++j) {
          for (int i = -wh; i <= wh; ++i, ++idx) {
            const double diff = ref[idx] - J.sample(qx + i, qy + j);
            bx += diff * gx[idx];
            by += diff * gy[idx];
          }
        }
        const double dx = (gyy * bx - gxy * by) / det;
        const double dy = (gxx * by - gxy * bx) / det;
        d.x += dx;
        d.y += dy;
        if (std::sqrt(dx * dx + dy * dy) < config.epsilon) break;
      }
    }

    if (level > 0) {
      d.x *= 2.0;
      d.y *= 2.0;
    }
  }

  return {{p.x + d.x, p.y + d.y}, TrackStatus::tracked};
}

namespace {

PointTrajectory track_one_query(std::span<const Pyramid> pyramids, Vec2 query,
                                int origin, const TrackerConfig& config) {
  const int n = static_cast<int>(pyramids.size());
  PointTrajectory traj;
  traj.origin = origin;
  traj.points.resize(n);
  traj.valid.assign(n, 1);
  traj.points[0] = query;

  Vec2 current = query;
  bool alive = true;
  for (int t = 1; t < n; ++t) {
    if (alive) {
      TrackResult r = track_point(pyramids[t - 1], pyramids[t], current, config);
      if (r.status == TrackStatus::tracked) {
        current = r.position;
      } else {
        alive = false;
      }
    }
    traj.points[t] = current;
    traj.valid[t] = alive ? 1 : 0;
  }
  return traj;
}

void check_track_inputs(std::span<const Pyramid> pyramids,
                        std::span<const Vec2> queries) {
  if (pyramids.size() < 2) throw validation_error("window too short");
  const GrayImage& base = pyramids.front().level(0);
  for (const Pyramid& p : pyramids) {
    if (p.level(0).width != base.width || p.level(0).height != base.height)
      throw validation_error("frame size mismatch");
  }
  for (const Vec2& q : queries) {
    if (q.x < 0.0 || q.y < 0.0 || q.x > base.width - 1.0 ||
        q.y > base.height - 1.0)
      throw validation_error("query outside frame bounds");
  }
}

}  // namespace

std::vector<PointTrajectory> track_points(std::span<const Pyramid> pyramids,
                                          std::span<const Vec2> queries,
                                          const TrackerConfig& config) {
  check_track_inputs(pyramids, queries);
  std::vector<PointTrajectory> out(queries.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(queries.size());
       ++q) {
    out[q] = track_one_query(pyramids, queries[q], static_cast<int>(q), config);
  }
  return out;
}

std::vector<PointTrajectory> track_points_serial(
    std::span<const Pyramid> pyramids, std::span<const Vec2> queries,
    const TrackerConfig& config) {
  check_track_inputs(pyramids, queries);
  std::vector<PointTrajectory> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    out[q] = track_one_query(pyramids, queries[q], static_cast<int>(q), config);
  }
  return out;
}

std::vector<PointTrajectory> track_points(std::span<const Frame> frames,
                                          std::span<const Vec2> queries,
                                          const TrackerConfig& config) {
  if (frames.size() < 2) throw validation_error("window too short");
  std::vector<Pyramid> pyramids = build_pyramids(frames, config);
  return track_points(pyramids, queries, config);
}

std::vector<Vec2> grid_queries(int width, int height, int k) {
  std::vector<Vec2> queries;
  queries.reserve(static_cast<std::size_t>(k) * k);
  for (int j = 0; j < k; ++j) {
    const double y = (j + 0.5) * height / k;
    for (int i = 0; i < k; ++i) {
      queries.push_back({(i + 0.5) * width / k, y});
    }
  }
  return queries;
}

std::vector<PointTrajectory> track_grid(std::span<const Pyramid> pyramids,
                                        int width, int height, int k,
                                        const TrackerConfig& config) {
  if (k < 2) throw validation_error("grid size must be >= 2");
  return track_points(pyramids, grid_queries(width, height, k), config);
}

std::vector<PointTrajectory> track_grid(std::span<const Frame> frames, int k,
                                        const TrackerConfig& config) {
  if (k < 2) throw validation_error("grid size must be >= 2");
  if (frames.size() < 2) throw validation_error("window too short");
  std::vector<Pyramid> pyramids = build_pyramids(frames, config);
  return track_points(pyramids,
                      grid_queries(frames[0].width, frames[0].height, k),
                      config);
}

}  // namespace vtrace
