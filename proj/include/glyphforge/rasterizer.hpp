#pragma once

// Unsigned distance fields of trajectories, sigmoid rendering, and the loose
// rasterization loss || ReLU(I_diff - I_gt) ||^2 with gradients w.r.t. the
// trajectory coordinates.
//
// Frames: trajectory coordinates live in [-1,1]^2. Pixel (row i, col j) has
// its center at x = -1 + (2j+1)/W, y = -1 + (2i+1)/H. Distances are measured
// in the pixel frame (one unit = one pixel pitch per axis), so the render
// sharpness theta and the half-width w are pixel quantities.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "glyphforge/error.hpp"
#include "glyphforge/format6.hpp"
#include "glyphforge/image.hpp"

namespace glyphforge {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Grid {
  std::size_t height = 128;
  std::size_t width = 128;

  Grid() = default;
  Grid(std::size_t h, std::size_t w) : height(h), width(w) {
    if (h == 0 || w == 0) throw Error(ErrorKind::InvalidArgument, "grid dimensions must be >= 1");
  }

  /// Normalized coordinate of pixel center (row, col).
  Vec2 pixel_center(std::size_t row, std::size_t col) const noexcept {
    return {-1.0 + (2.0 * static_cast<double>(col) + 1.0) / static_cast<double>(width),
            -1.0 + (2.0 * static_cast<double>(row) + 1.0) / static_cast<double>(height)};
  }

  /// Normalized coordinate -> continuous pixel frame (x = column, y = row).
  Vec2 to_pixel(Vec2 p) const noexcept {
    return {(p.x + 1.0) * 0.5 * static_cast<double>(width) - 0.5,
            (p.y + 1.0) * 0.5 * static_cast<double>(height) - 0.5};
  }

  /// d(pixel frame)/d(normalized) per axis.
  Vec2 pixel_scale() const noexcept {
    return {0.5 * static_cast<double>(width), 0.5 * static_cast<double>(height)};
  }

  bool matches(const Raster& r) const noexcept { return r.height() == height && r.width() == width; }
};

struct RenderParams {
  double theta = 100.0;      ///< sigmoid sharpness, per pixel
  double half_width = 2.0;   ///< w, in pixels

  void validate() const {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw Error(ErrorKind::InvalidArgument, "theta must be > 0");
    if (!(half_width >= 0.0) || !std::isfinite(half_width)) {
      throw Error(ErrorKind::InvalidArgument, "line half-width must be >= 0");
    }
  }
};

// ---------------------------------------------------------------------------
// point-to-segment distance

enum class DistanceCase { BeforeStart, BeyondEnd, Perpendicular, Degenerate };

struct SegmentDistance {
  double value = kInf;
  DistanceCase which = DistanceCase::Perpendicular;
  Vec2 d_start;  ///< d value / d start point
  Vec2 d_end;    ///< d value / d end point
};

namespace detail {

// Three-case distance: endpoint distance when x projects outside the
// segment, otherwise |cross| / |segment|.
inline SegmentDistance segment_distance_with_grad(Vec2 x, Vec2 a, Vec2 b) noexcept {
  SegmentDistance r;
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) {
    r.which = DistanceCase::Degenerate;
    r.value = length(x - a);
    if (r.value > 0.0) r.d_start = (1.0 / r.value) * (a - x);
    return r;
  }
  if (dot(ab, x - a) < 0.0) {
    r.which = DistanceCase::BeforeStart;
    r.value = length(x - a);
    if (r.value > 0.0) r.d_start = (1.0 / r.value) * (a - x);
    return r;
  }
  if (dot(a - b, x - b) < 0.0) {
    r.which = DistanceCase::BeyondEnd;
    r.value = length(x - b);
    if (r.value > 0.0) r.d_end = (1.0 / r.value) * (b - x);
    return r;
  }
  r.which = DistanceCase::Perpendicular;
  r.value = std::abs(cross(a - x, b - x)) / std::sqrt(len2);
  if (r.value > 0.0) {
    // Moving the foot point q = a + t (b - a) along the normal n is the only
    // first-order effect: dd/da = (1 - t) n, dd/db = t n.
    const double t = dot(x - a, ab) / len2;
    const Vec2 q = a + t * ab;
    const Vec2 n = (1.0 / r.value) * (q - x);
    r.d_start = (1.0 - t) * n;
    r.d_end = t * n;
  }
  return r;
}

inline double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct PixelSegment {
  Vec2 start;
  Vec2 end;
  std::size_t index;  ///< segment index = index of its start point
};

inline std::vector<PixelSegment> pixel_segments(const Trajectory& t, const Grid& g, bool include_connections) {
  std::vector<PixelSegment> out;
  const auto segs = visible_segments(t, include_connections);
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (segs[k].visible) out.push_back({g.to_pixel(segs[k].start), g.to_pixel(segs[k].end), k});
  }
  return out;
}

}  // namespace detail

/// Distance from x to segment s, +inf for an invisible segment. Any frame
/// works as long as x and s share it.
inline double segment_distance(Vec2 x, const Segment& s) noexcept {
  if (!s.visible) return kInf;
  return detail::segment_distance_with_grad(x, s.start, s.end).value;
}

inline constexpr std::ptrdiff_t kNoSegment = -1;

struct UdfResult {
  DistanceField field;
  /// Per pixel, index of the nearest visible segment (lowest index on ties),
  /// kNoSegment where the field is +inf.
  std::vector<std::ptrdiff_t> nearest;
};

inline UdfResult udf_with_nearest(const Trajectory& t, const Grid& g, bool include_connections = false) {
  UdfResult out{DistanceField(g.height, g.width, kInf),
                std::vector<std::ptrdiff_t>(g.height * g.width, kNoSegment)};
  const auto segs = detail::pixel_segments(t, g, include_connections);
  for (std::size_t i = 0; i < g.height; ++i) {
    for (std::size_t j = 0; j < g.width; ++j) {
      const Vec2 x{static_cast<double>(j), static_cast<double>(i)};
      double best = kInf;
      std::ptrdiff_t arg = kNoSegment;
      for (const auto& s : segs) {
        const double d = detail::segment_distance_with_grad(x, s.start, s.end).value;
        if (d < best) {
          best = d;
          arg = static_cast<std::ptrdiff_t>(s.index);
        }
      }
      out.field.at(i, j) = best;
      out.nearest[i * g.width + j] = arg;
    }
  }
  return out;
}

/// Unsigned distance field in pixel units.
inline DistanceField udf(const Trajectory& t, const Grid& g, bool include_connections = false) {
  return udf_with_nearest(t, g, include_connections).field;
}

/// pixel = 1 - sigmoid(theta (dist - w)); +inf maps to exactly 0.
inline GlyphImage render(const DistanceField& f, const RenderParams& p) {
  p.validate();
  GlyphImage img(f.height(), f.width());
  for (std::size_t k = 0; k < f.size(); ++k) img[k] = detail::sigmoid(p.theta * (p.half_width - f[k]));
  return img;
}

struct LossDiffResult {
  double value = 0.0;
  std::vector<Vec2> grad;  ///< d loss / d (x_k, y_k) in normalized coordinates
};

inline LossDiffResult loss_diff(const Trajectory& t, const GlyphImage& target, const Grid& g, const RenderParams& p,
                                bool include_connections = false) {
  p.validate();
  if (!g.matches(target)) {
    throw Error(ErrorKind::DimensionMismatch, "target is " + std::to_string(target.height()) + "x" +
                                                  std::to_string(target.width()) + ", grid is " +
                                                  std::to_string(g.height) + "x" + std::to_string(g.width));
  }
  const auto segs = detail::pixel_segments(t, g, include_connections);
  LossDiffResult out{0.0, std::vector<Vec2>(t.size())};
  for (std::size_t i = 0; i < g.height; ++i) {
    for (std::size_t j = 0; j < g.width; ++j) {
      const Vec2 x{static_cast<double>(j), static_cast<double>(i)};
      SegmentDistance best;
      const detail::PixelSegment* arg = nullptr;
      for (const auto& s : segs) {
        auto d = detail::segment_distance_with_grad(x, s.start, s.end);
        if (d.value < best.value) {
          best = d;
          arg = &s;
        }
      }
      const double ink = detail::sigmoid(p.theta * (p.half_width - best.value));
      const double excess = ink - target.at(i, j);
      if (!(excess > 0.0)) continue;
      out.value += excess * excess;
      if (arg == nullptr) continue;
      // d ink / d dist = -theta ink (1 - ink)
      const double g_dist = -2.0 * excess * p.theta * ink * (1.0 - ink);
      out.grad[arg->index] = out.grad[arg->index] + g_dist * best.d_start;
      out.grad[arg->index + 1] = out.grad[arg->index + 1] + g_dist * best.d_end;
    }
  }
  const Vec2 scale = g.pixel_scale();
  for (auto& gr : out.grad) gr = {gr.x * scale.x, gr.y * scale.y};
  return out;
}

struct SnapResult {
  Trajectory trajectory;
  std::vector<double> trace;  ///< loss at iterates 0..steps
};

/// Plain gradient descent on the point coordinates against loss_diff.
/// Controls never change; coordinates are clamped to [-1,1] after each step.
inline SnapResult snap_fit(const Trajectory& t0, const GlyphImage& target, const Grid& g, const RenderParams& p,
                           std::size_t steps, double step_size, bool include_connections = false) {
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw Error(ErrorKind::InvalidArgument, "step size must be a finite value >= 0");
  }
  SnapResult out{t0, {}};
  out.trace.reserve(steps + 1);
  for (std::size_t s = 0; s < steps; ++s) {
    const auto l = loss_diff(out.trajectory, target, g, p, include_connections);
    out.trace.push_back(l.value);
    if (l.value == 0.0 || step_size == 0.0) continue;
    std::vector<Vec2> pos;
    pos.reserve(out.trajectory.size());
    for (std::size_t k = 0; k < out.trajectory.size(); ++k) {
      pos.push_back(out.trajectory[k].pos() - step_size * l.grad[k]);
    }
    out.trajectory = out.trajectory.with_positions(pos);
  }
  out.trace.push_back(loss_diff(out.trajectory, target, g, p, include_connections).value);
  return out;
}

}  // namespace glyphforge
