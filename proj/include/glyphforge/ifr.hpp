#pragma once

// Image Feature Recombination: a double attention that maps image features
// into the sequence domain and back.
//
//   Q_seq = LayerNorm(softmax(Q_img K_seq^T / sqrt(d)) V_seq)
//   out   = softmax(Q_seq K_img^T / sqrt(d)) f_img
//
// f_img is spatial-major, (H*W) x C. Each output row is a convex combination
// of f_img rows, so the result stays inside the per-channel range of the
// input features. The sequence feature is a constant input here.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "glyphforge/error.hpp"
#include "glyphforge/matrix.hpp"

namespace glyphforge {

inline constexpr double kLayerNormEps = 1e-5;

struct ImageFeatureMap {
  std::size_t height = 0;
  std::size_t width = 0;
  Matrix features;  ///< (height * width) x channels

  ImageFeatureMap() = default;
  ImageFeatureMap(std::size_t h, std::size_t w, Matrix f) : height(h), width(w), features(std::move(f)) {
    if (h * w == 0 || features.rows() != h * w || features.cols() == 0) {
      throw Error(ErrorKind::ShapeMismatch, "image feature map must be (H*W) x C with H*W, C >= 1");
    }
  }

  std::size_t sites() const noexcept { return features.rows(); }
  std::size_t channels() const noexcept { return features.cols(); }
};

/// Linear maps are stored out x in (y = W x).
struct IfrWeights {
  Matrix q_img;  ///< d x C
  Matrix k_img;  ///< d x C
  Matrix k_seq;  ///< d x D_s
  Matrix v_seq;  ///< d x D_s
  std::vector<double> ln_gain;
  std::vector<double> ln_bias;

  std::size_t dim() const noexcept { return q_img.rows(); }

  /// Gain 1 and bias 0 when the layer-norm parameters are left empty.
  void validate(std::size_t channels, std::size_t seq_channels) const {
    const std::size_t d = dim();
    if (d == 0) throw Error(ErrorKind::ShapeMismatch, "attention dimension d must be >= 1");
    if (k_img.rows() != d || k_seq.rows() != d || v_seq.rows() != d) {
      throw Error(ErrorKind::ShapeMismatch, "all IFR maps must output d channels");
    }
    if (q_img.cols() != channels || k_img.cols() != channels) {
      throw Error(ErrorKind::ShapeMismatch, "image maps expect " + std::to_string(q_img.cols()) +
                                                " channels, feature has " + std::to_string(channels));
    }
    if (k_seq.cols() != seq_channels || v_seq.cols() != seq_channels) {
      throw Error(ErrorKind::ShapeMismatch, "sequence maps do not match the sequence feature width");
    }
    if ((!ln_gain.empty() && ln_gain.size() != d) || (!ln_bias.empty() && ln_bias.size() != d)) {
      throw Error(ErrorKind::ShapeMismatch, "layer-norm parameters must have d entries");
    }
  }
};

/// Population-variance layer norm with eps = 1e-5. Empty gain/bias mean 1/0.
inline std::vector<double> layer_norm(std::span<const double> v, std::span<const double> gain = {},
                                      std::span<const double> bias = {}) {
  const std::size_t d = v.size();
  if (d == 0) throw Error(ErrorKind::ShapeMismatch, "layer norm of an empty vector");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(d);
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(d);
  const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
  std::vector<double> out(d);
  for (std::size_t k = 0; k < d; ++k) {
    out[k] = (v[k] - mean) * inv * (gain.empty() ? 1.0 : gain[k]) + (bias.empty() ? 0.0 : bias[k]);
  }
  return out;
}

namespace detail {

/// Row-wise scaled-logit softmax, in place. Logits are max-subtracted; a
/// non-finite logit is reported instead of propagating NaN.
inline void attention_softmax(Matrix& logits, double scale) {
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    for (double& v : row) {
      v *= scale;
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "attention logit overflow", 0, r);
    }
    softmax_inplace(row);
  }
}

}  // namespace detail

struct IfrResult {
  ImageFeatureMap recombined;
  Matrix image_to_sequence;  ///< (H*W) x L weights of the first attention
  Matrix sequence_to_image;  ///< (H*W) x (H*W) weights of the second
};

inline IfrResult ifr_forward(const ImageFeatureMap& f_img, const Matrix& f_seq, const IfrWeights& w) {
  if (f_seq.rows() == 0 || f_seq.cols() == 0) throw Error(ErrorKind::ShapeMismatch, "empty sequence feature");
  w.validate(f_img.channels(), f_seq.cols());
  if (!f_img.features.all_finite() || !f_seq.all_finite()) {
    throw Error(ErrorKind::NonFinite, "IFR inputs must be finite");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(w.dim()));

  const Matrix q_img = multiply_transposed(f_img.features, w.q_img);  // HW x d
  const Matrix k_img = multiply_transposed(f_img.features, w.k_img);  // HW x d
  const Matrix k_seq = multiply_transposed(f_seq, w.k_seq);           // L x d
  const Matrix v_seq = multiply_transposed(f_seq, w.v_seq);           // L x d

  Matrix attn1 = multiply_transposed(q_img, k_seq);  // HW x L
  detail::attention_softmax(attn1, scale);
  Matrix q_seq = multiply(attn1, v_seq);  // HW x d
  for (std::size_t r = 0; r < q_seq.rows(); ++r) {
    const auto normed = layer_norm(q_seq.row(r), w.ln_gain, w.ln_bias);
    std::copy(normed.begin(), normed.end(), q_seq.row(r).begin());
  }

  Matrix attn2 = multiply_transposed(q_seq, k_img);  // HW x HW
  detail::attention_softmax(attn2, scale);
  Matrix out = multiply(attn2, f_img.features);

  return {ImageFeatureMap(f_img.height, f_img.width, std::move(out)), std::move(attn1), std::move(attn2)};
}

}  // namespace glyphforge
