#pragma once

// Dual-modality representation learning: distillation to a unit-norm
// half-dimension feature, linear restoration, and the InfoNCE /
// reconstruction / style-classification losses tying image and sequence
// features together.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "glyphforge/error.hpp"
#include "glyphforge/matrix.hpp"

namespace glyphforge {

inline constexpr double kDefaultTemperature = 10.0;
inline constexpr double kMinDistillNorm = 1e-12;

using Feature = std::vector<double>;

/// W_d: (D/2) x D, W_r: D x (D/2).
struct DistillWeights {
  Matrix down;
  Matrix up;

  std::size_t full_dim() const noexcept { return down.cols(); }

  void validate() const {
    const std::size_t d = down.cols();
    if (d == 0 || d % 2 != 0) throw Error(ErrorKind::ShapeMismatch, "feature dimension D must be even and >= 2");
    if (down.rows() != d / 2 || up.rows() != d || up.cols() != d / 2) {
      throw Error(ErrorKind::ShapeMismatch, "distill maps must be (D/2)xD and Dx(D/2)");
    }
  }
};

/// W_d f / |W_d f|.
inline Feature distill(std::span<const double> f, const DistillWeights& w) {
  w.validate();
  if (f.size() != w.full_dim()) throw Error(ErrorKind::ShapeMismatch, "feature size differs from D");
  Feature out = apply(w.down, f);
  const double n = norm(out);
  if (!(n >= kMinDistillNorm)) throw Error(ErrorKind::ZeroVector, "distilled feature has (near) zero norm");
  for (double& v : out) v /= n;
  return out;
}

inline Feature restore(std::span<const double> fd, const DistillWeights& w) {
  w.validate();
  if (fd.size() != w.full_dim() / 2) throw Error(ErrorKind::ShapeMismatch, "distilled feature size differs from D/2");
  return apply(w.up, fd);
}

/// Mean over the L rows of a sequence feature.
inline Feature mean_pool(const Matrix& rows) {
  if (rows.rows() == 0) throw Error(ErrorKind::ShapeMismatch, "cannot pool an empty sequence");
  Feature out(rows.cols(), 0.0);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.cols(); ++c) out[c] += rows(r, c);
  }
  for (double& v : out) v /= static_cast<double>(rows.rows());
  return out;
}

// ---------------------------------------------------------------------------
// InfoNCE

struct NceConfig {
  double temperature = kDefaultTemperature;
};

struct NceResult {
  double value = 0.0;
  std::vector<Feature> grad_image;
  std::vector<Feature> grad_sequence;
};

/// One-directional InfoNCE anchored on image features:
///   (1/B) sum_i -log( exp(tau cos(img_i, seq_i)) / sum_j exp(tau cos(img_i, seq_j)) )
/// Cosines are computed from the given vectors, so gradients are tangent to
/// the unit sphere when the inputs are unit norm.
inline NceResult loss_nce(const std::vector<Feature>& image, const std::vector<Feature>& sequence,
                          const NceConfig& cfg = {}) {
  const std::size_t b = image.size();
  if (b == 0 || sequence.size() != b) {
    throw Error(ErrorKind::BatchMismatch, std::to_string(image.size()) + " image vs " +
                                              std::to_string(sequence.size()) + " sequence features");
  }
  if (!(cfg.temperature > 0.0)) throw Error(ErrorKind::InvalidArgument, "temperature must be > 0");
  const std::size_t dim = image[0].size();
  for (std::size_t i = 0; i < b; ++i) {
    if (image[i].size() != dim || sequence[i].size() != dim) {
      throw Error(ErrorKind::BatchMismatch, "feature dimensions differ within the batch", 0, i);
    }
  }
  std::vector<double> img_norm(b);
  std::vector<double> seq_norm(b);
  for (std::size_t i = 0; i < b; ++i) {
    img_norm[i] = norm(image[i]);
    seq_norm[i] = norm(sequence[i]);
    if (img_norm[i] == 0.0 || seq_norm[i] == 0.0) throw Error(ErrorKind::ZeroVector, "zero feature in batch", 0, i);
  }
  Matrix cosine(b, b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) cosine(i, j) = dot(image[i], sequence[j]) / (img_norm[i] * seq_norm[j]);
  }

  NceResult out{0.0, std::vector<Feature>(b, Feature(dim, 0.0)), std::vector<Feature>(b, Feature(dim, 0.0))};
  const double tau = cfg.temperature;
  const double inv_b = 1.0 / static_cast<double>(b);
  std::vector<double> logits(b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) logits[j] = tau * cosine(i, j);
    out.value += log_sum_exp(logits) - logits[i];
    softmax_inplace(logits);
    for (std::size_t j = 0; j < b; ++j) {
      // d loss / d cos_ij
      const double g = inv_b * tau * (logits[j] - (i == j ? 1.0 : 0.0));
      if (g == 0.0) continue;
      const double c = cosine(i, j);
      for (std::size_t k = 0; k < dim; ++k) {
        const double u = image[i][k] / img_norm[i];
        const double v = sequence[j][k] / seq_norm[j];
        out.grad_image[i][k] += g * (v - c * u) / img_norm[i];
        out.grad_sequence[j][k] += g * (u - c * v) / seq_norm[j];
      }
    }
  }
  out.value *= inv_b;
  return out;
}

/// |f_img - r_img|^2 + |f_seq - r_seq|^2.
inline double loss_rec(std::span<const double> f_img, std::span<const double> r_img, std::span<const double> f_seq,
                       std::span<const double> r_seq) {
  if (f_img.size() != r_img.size() || f_seq.size() != r_seq.size()) {
    throw Error(ErrorKind::DimensionMismatch, "reconstruction pairs differ in dimension");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < f_img.size(); ++k) acc += (f_img[k] - r_img[k]) * (f_img[k] - r_img[k]);
  for (std::size_t k = 0; k < f_seq.size(); ++k) acc += (f_seq[k] - r_seq[k]) * (f_seq[k] - r_seq[k]);
  return acc;
}

// ---------------------------------------------------------------------------
// style classification

struct AffineClassifier {
  Matrix weight;             ///< K x in
  std::vector<double> bias;  ///< K entries, empty means zero

  std::vector<double> logits(std::span<const double> f) const {
    auto out = apply(weight, f);
    if (!bias.empty()) {
      if (bias.size() != out.size()) throw Error(ErrorKind::ShapeMismatch, "classifier bias size");
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += bias[k];
    }
    return out;
  }
};

/// D_1..D_4 applied to (f_img_s, f_d_img, f_seq_s, f_d_seq).
struct StyleClassifier {
  AffineClassifier image;
  AffineClassifier image_distilled;
  AffineClassifier sequence;
  AffineClassifier sequence_distilled;

  std::size_t styles() const noexcept { return image.weight.rows(); }
};

struct StyleFeatures {
  Feature image;
  Feature image_distilled;
  Feature sequence;
  Feature sequence_distilled;
};

inline double loss_dml(const StyleFeatures& f, const StyleClassifier& cls, std::size_t label) {
  const std::size_t k = cls.styles();
  const AffineClassifier* heads[] = {&cls.image, &cls.image_distilled, &cls.sequence, &cls.sequence_distilled};
  const Feature* inputs[] = {&f.image, &f.image_distilled, &f.sequence, &f.sequence_distilled};
  for (const auto* h : heads) {
    if (h->weight.rows() != k) throw Error(ErrorKind::ShapeMismatch, "classifiers disagree on style count");
  }
  if (label >= k) {
    throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(label) + " with " + std::to_string(k) + " styles");
  }
  double acc = 0.0;
  for (std::size_t h = 0; h < 4; ++h) acc += cross_entropy(heads[h]->logits(*inputs[h]), label);
  return acc;
}

}  // namespace glyphforge
