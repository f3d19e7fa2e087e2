#pragma once

// Format-6 writing trajectories: key points (x, y) in [-1,1]^2 with a one-hot
// control label (p1, p2, p3, p4):
//   p1  Draw                a visible segment joins this point to the next
//   p2  EndStroke           stroke ends, pen lifts to the next stroke
//   p3  EndStrokeConnected  stroke ends but is visually joined to the next
//   p4  EndWriting          last point of the character
//
// Text format (LF line endings):
//   #glyphforge-traj v1
//   x y p1 p2 p3 p4
//   ...
// Other lines starting with '#' are comments.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "glyphforge/error.hpp"

namespace glyphforge {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 a) noexcept { return std::hypot(a.x, a.y); }

enum class Control { Draw, EndStroke, EndStrokeConnected, EndWriting };

inline std::array<int, 4> one_hot(Control c) noexcept {
  std::array<int, 4> p{0, 0, 0, 0};
  p[static_cast<std::size_t>(c)] = 1;
  return p;
}

inline bool is_stroke_end(Control c) noexcept {
  return c == Control::EndStroke || c == Control::EndStrokeConnected;
}

struct Point6 {
  double x = 0.0;
  double y = 0.0;
  Control control = Control::Draw;

  Vec2 pos() const noexcept { return {x, y}; }

  friend bool operator==(const Point6&, const Point6&) = default;
};

inline constexpr double kCoordClampSlack = 1e-9;

/// Validated trajectory. Construction checks every invariant, so a
/// Trajectory value is always well formed.
class Trajectory {
 public:
  explicit Trajectory(std::vector<Point6> points) : points_(std::move(points)) { validate(); }

  const std::vector<Point6>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Point6& operator[](std::size_t i) const noexcept { return points_[i]; }

  /// Copy with new coordinates; controls are kept. Coordinates are clamped
  /// to [-1, 1].
  Trajectory with_positions(const std::vector<Vec2>& pos) const {
    if (pos.size() != points_.size()) {
      throw Error(ErrorKind::LengthMismatch, "position count differs from trajectory length");
    }
    std::vector<Point6> out = points_;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].x = std::clamp(pos[i].x, -1.0, 1.0);
      out[i].y = std::clamp(pos[i].y, -1.0, 1.0);
    }
    return Trajectory(std::move(out));
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  void validate() const {
    if (points_.empty()) throw Error(ErrorKind::BadTermination, "trajectory has no points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      if (!(std::abs(p.x) <= 1.0) || !(std::abs(p.y) <= 1.0)) {
        throw Error(ErrorKind::OutOfRange, "coordinate outside [-1,1] at point " + std::to_string(i), 0, i);
      }
      const bool last = i + 1 == points_.size();
      if ((p.control == Control::EndWriting) != last) {
        throw Error(ErrorKind::BadTermination,
                    last ? "last point is not EndWriting" : "EndWriting before the last point", 0, i);
      }
    }
  }

  std::vector<Point6> points_;
};

struct Segment {
  Vec2 start;
  Vec2 end;
  bool visible = false;
};

/// One segment per consecutive point pair. A segment is visible when its
/// start point is Draw, or EndStrokeConnected with include_connections set.
inline std::vector<Segment> visible_segments(const Trajectory& t, bool include_connections) {
  std::vector<Segment> out;
  out.reserve(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const Control c = t[i].control;
    const bool visible =
        c == Control::Draw || (include_connections && c == Control::EndStrokeConnected);
    out.push_back({t[i].pos(), t[i + 1].pos(), visible});
  }
  return out;
}

// ---------------------------------------------------------------------------
// format-5 upgrade

enum class Control5 { Draw, EndStroke, EndWriting };

struct Point5 {
  double x = 0.0;
  double y = 0.0;
  Control5 control = Control5::Draw;
};

/// Upgrades format-5 points: the k-th end-stroke point becomes
/// EndStrokeConnected when connected_flags[k] is set, EndStroke otherwise.
inline Trajectory from_format5(const std::vector<Point5>& points, const std::vector<bool>& connected_flags) {
  std::size_t ends = 0;
  for (const auto& p : points) ends += p.control == Control5::EndStroke;
  if (ends != connected_flags.size()) {
    throw Error(ErrorKind::LengthMismatch, "expected " + std::to_string(ends) + " connection flags, got " +
                                               std::to_string(connected_flags.size()));
  }
  std::vector<Point6> out;
  out.reserve(points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    Control c = Control::Draw;
    switch (p.control) {
      case Control5::Draw: c = Control::Draw; break;
      case Control5::EndStroke: c = connected_flags[k++] ? Control::EndStrokeConnected : Control::EndStroke; break;
      case Control5::EndWriting: c = Control::EndWriting; break;
    }
    out.push_back({p.x, p.y, c});
  }
  return Trajectory(std::move(out));
}

// ---------------------------------------------------------------------------
// text format

inline constexpr std::string_view kTrajectoryHeader = "#glyphforge-traj v1";

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

/// Splits text into lines, dropping a trailing '\r' from each.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++lineno, line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

}  // namespace detail

inline Trajectory parse_trajectory(std::string_view text) {
  std::vector<Point6> points;
  std::vector<std::size_t> point_lines;
  bool header_seen = false;
  std::size_t last_line = 0;
  detail::for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    last_line = lineno;
    if (!header_seen) {
      if (line != kTrajectoryHeader) {
        throw Error(ErrorKind::MalformedLine, "expected header '" + std::string(kTrajectoryHeader) + "'", lineno);
      }
      header_seen = true;
      return;
    }
    if (detail::is_blank(line) || line.front() == '#') return;
    const auto fields = detail::split_fields(line);
    if (fields.size() != 6) {
      throw Error(ErrorKind::MalformedLine, "expected 6 fields, got " + std::to_string(fields.size()), lineno);
    }
    std::array<double, 6> v{};
    for (std::size_t k = 0; k < 6; ++k) {
      if (!detail::parse_double(fields[k], v[k])) {
        throw Error(ErrorKind::MalformedLine, "non-numeric field '" + std::string(fields[k]) + "'", lineno);
      }
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const double a = std::abs(v[k]);
      if (!(a <= 1.0 + kCoordClampSlack)) {
        throw Error(ErrorKind::OutOfRange, "coordinate " + std::string(fields[k]) + " outside [-1,1]", lineno,
                    points.size());
      }
      v[k] = std::clamp(v[k], -1.0, 1.0);
    }
    int set = 0;
    std::size_t which = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double p = v[2 + k];
      if (p != 0.0 && p != 1.0) {
        throw Error(ErrorKind::InvalidControl, "control field must be 0 or 1", lineno, points.size());
      }
      if (p == 1.0) {
        ++set;
        which = k;
      }
    }
    if (set != 1) throw Error(ErrorKind::InvalidControl, "control label is not one-hot", lineno, points.size());
    points.push_back({v[0], v[1], static_cast<Control>(which)});
    point_lines.push_back(lineno);
  });
  if (!header_seen) throw Error(ErrorKind::MalformedLine, "empty input, missing header", 1);
  if (points.empty()) throw Error(ErrorKind::BadTermination, "no points", last_line);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if ((points[i].control == Control::EndWriting) != (i + 1 == points.size())) {
      throw Error(ErrorKind::BadTermination,
                  i + 1 == points.size() ? "last point is not EndWriting" : "EndWriting before the last point",
                  point_lines[i], i);
    }
  }
  return Trajectory(std::move(points));
}

inline std::string serialize_trajectory(const Trajectory& t) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& p : t.points()) {
    const auto oh = one_hot(p.control);
    out += detail::format_double(p.x);
    out += ' ';
    out += detail::format_double(p.y);
    for (int b : oh) {
      out += ' ';
      out += static_cast<char>('0' + b);
    }
    out += '\n';
  }
  return out;
}

}  // namespace glyphforge
