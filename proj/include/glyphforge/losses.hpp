#pragma once

// Image-branch losses and the weighted objective.
//   loss_img   = l4 loss_pixel + l5 loss_gram
//   loss_seq   = l1 loss_point + l2 loss_label + l3 loss_diff
//   loss_total = loss_img + loss_seq + loss_nce + loss_rec + loss_dml
// Perceptual features are supplied by the caller as flattened N x C maps.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "glyphforge/error.hpp"
#include "glyphforge/image.hpp"
#include "glyphforge/matrix.hpp"

namespace glyphforge {

struct LossWeights {
  double lambda1 = 1.0;  ///< loss_point
  double lambda2 = 1.0;  ///< loss_label
  double lambda3 = 1.0;  ///< loss_diff
  double lambda4 = 1.0;  ///< loss_pixel
  double lambda5 = 1.0;  ///< loss_gram

  void validate() const {
    for (double l : {lambda1, lambda2, lambda3, lambda4, lambda5}) {
      if (!(l >= 0.0) || !std::isfinite(l)) throw Error(ErrorKind::InvalidArgument, "loss weights must be >= 0");
    }
  }
};

using FeatureStack = std::vector<Matrix>;

/// Mean absolute pixel error.
inline double loss_pixel(const GlyphImage& gt, const GlyphImage& fake) {
  if (!gt.same_shape(fake)) throw Error(ErrorKind::DimensionMismatch, "images differ in size");
  if (gt.size() == 0) throw Error(ErrorKind::DimensionMismatch, "empty image");
  double acc = 0.0;
  for (std::size_t k = 0; k < gt.size(); ++k) acc += std::abs(gt[k] - fake[k]);
  return acc / static_cast<double>(gt.size());
}

/// F^T F / N for an N x C feature matrix.
inline Matrix gram(const Matrix& f) {
  if (f.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "gram of an empty feature map");
  const std::size_t c = f.cols();
  Matrix g(c, c);
  for (std::size_t n = 0; n < f.rows(); ++n) {
    const auto row = f.row(n);
    for (std::size_t a = 0; a < c; ++a) {
      for (std::size_t b = a; b < c; ++b) g(a, b) += row[a] * row[b];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(f.rows());
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = a; b < c; ++b) {
      g(a, b) *= inv_n;
      g(b, a) = g(a, b);
    }
  }
  return g;
}

/// Sum over layers of the mean absolute Gram difference.
inline double loss_gram(const FeatureStack& gt, const FeatureStack& fake) {
  if (gt.size() != fake.size()) throw Error(ErrorKind::DimensionMismatch, "feature stacks differ in depth");
  double acc = 0.0;
  for (std::size_t l = 0; l < gt.size(); ++l) {
    if (gt[l].rows() != fake[l].rows() || gt[l].cols() != fake[l].cols()) {
      throw Error(ErrorKind::DimensionMismatch, "layer " + std::to_string(l) + " shapes differ", 0, l);
    }
    const Matrix ga = gram(gt[l]);
    const Matrix gb = gram(fake[l]);
    double layer = 0.0;
    for (std::size_t k = 0; k < ga.size(); ++k) layer += std::abs(ga.values()[k] - gb.values()[k]);
    acc += layer / static_cast<double>(ga.size());
  }
  return acc;
}

inline double combine_seq(double loss_point, double loss_label, double loss_diff, const LossWeights& w) {
  return w.lambda1 * loss_point + w.lambda2 * loss_label + w.lambda3 * loss_diff;
}

inline double combine_img(double loss_pixel, double loss_gram, const LossWeights& w) {
  return w.lambda4 * loss_pixel + w.lambda5 * loss_gram;
}

inline double combine_total(double loss_img, double loss_seq, double loss_nce, double loss_rec, double loss_dml) {
  return loss_img + loss_seq + loss_nce + loss_rec + loss_dml;
}

}  // namespace glyphforge
