#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "glyphforge/error.hpp"
#include "glyphforge/format6.hpp"
#include "glyphforge/image.hpp"

namespace glyphforge {

inline double mae(const GlyphImage& a, const GlyphImage& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::DimensionMismatch, "images differ in size");
  if (a.size() == 0) throw Error(ErrorKind::DimensionMismatch, "empty image");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
  return acc / static_cast<double>(a.size());
}

struct DtwResult {
  double cost = 0.0;
  /// 0-based index pairs from (0,0) to (n-1,m-1).
  std::vector<std::pair<std::size_t, std::size_t>> path;

  double normalized() const noexcept { return path.empty() ? 0.0 : cost / static_cast<double>(path.size()); }
};

/// Classic unconstrained DTW with Euclidean point cost; controls are ignored.
inline DtwResult dtw(const Trajectory& a, const Trajectory& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0 || m == 0) throw Error(ErrorKind::EmptySequence, "dtw needs two non-empty sequences");
  const double inf = std::numeric_limits<double>::infinity();
  // acc[i][j] = cost of the best alignment of a[0..i], b[0..j]
  std::vector<double> acc(n * m, inf);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };
  auto cost = [&](std::size_t i, std::size_t j) { return length(a[i].pos() - b[j].pos()); };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = cost(i, j);
      if (i == 0 && j == 0) {
        at(i, j) = c;
        continue;
      }
      double best = inf;
      if (i > 0 && j > 0) best = at(i - 1, j - 1);
      if (i > 0 && at(i - 1, j) < best) best = at(i - 1, j);
      if (j > 0 && at(i, j - 1) < best) best = at(i, j - 1);
      at(i, j) = best + c;
    }
  }
  DtwResult r{at(n - 1, m - 1), {}};
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  r.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    } else if (i > 0) {
      --i;
    } else {
      --j;
    }
    r.path.emplace_back(i, j);
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

}  // namespace glyphforge
