#pragma once

// Pseudo connected-stroke labels. A stroke boundary (end point k, next start
// point k+1) is marked connected iff the two points are closer than the
// threshold in the glyph's own trajectory but farther apart than the
// threshold in the character's mean skeleton, i.e. the join is specific to
// this style rather than to the character.

#include <cstddef>
#include <string>
#include <vector>

#include "glyphforge/error.hpp"
#include "glyphforge/format6.hpp"

namespace glyphforge {

inline constexpr double kDefaultAnnotateThreshold = 0.1;

struct AnnotateConfig {
  double threshold = kDefaultAnnotateThreshold;
};

inline Trajectory pseudo_annotate(const Trajectory& t, const Trajectory& mean_ref, const AnnotateConfig& cfg = {}) {
  if (!(cfg.threshold > 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be > 0");
  if (t.size() != mean_ref.size()) {
    throw Error(ErrorKind::LengthMismatch, "trajectory has " + std::to_string(t.size()) + " points, mean reference " +
                                               std::to_string(mean_ref.size()));
  }
  std::vector<Point6> out = t.points();
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const bool end_here = is_stroke_end(t[k].control);
    if (end_here != is_stroke_end(mean_ref[k].control)) {
      throw Error(ErrorKind::StrokeBoundaryMismatch, "stroke ends differ at point " + std::to_string(k), 0, k);
    }
    if (!end_here) continue;
    const bool close_here = length(t[k + 1].pos() - t[k].pos()) < cfg.threshold;
    const bool apart_in_mean = length(mean_ref[k + 1].pos() - mean_ref[k].pos()) > cfg.threshold;
    out[k].control = close_here && apart_in_mean ? Control::EndStrokeConnected : Control::EndStroke;
  }
  return Trajectory(std::move(out));
}

}  // namespace glyphforge
