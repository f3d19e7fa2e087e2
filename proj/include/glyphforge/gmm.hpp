#pragma once

// Bivariate Gaussian mixture head of the trajectory decoder and the
// control-label classifier loss.
//
// Raw network output for one step is 6M reals laid out in blocks of M:
//   [pi_logit | mu_x | mu_y | log_sigma_x | log_sigma_y | rho_raw]
// activate() maps it to a valid mixture with softmax / identity / exp / tanh.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glyphforge/error.hpp"
#include "glyphforge/format6.hpp"
#include "glyphforge/matrix.hpp"
#include "glyphforge/rng.hpp"

namespace glyphforge {

inline constexpr std::size_t kDefaultMixtureComponents = 20;
inline constexpr double kRhoLimit = 1.0 - 1e-6;
inline constexpr double kLogSigmaLimit = 700.0;
inline constexpr double kDensityFloor = 1e-12;

struct GmmParams {
  std::vector<double> pi;
  std::vector<double> mu_x;
  std::vector<double> mu_y;
  std::vector<double> sigma_x;
  std::vector<double> sigma_y;
  std::vector<double> rho;

  std::size_t components() const noexcept { return pi.size(); }

  void validate() const {
    const std::size_t m = pi.size();
    if (m == 0 || mu_x.size() != m || mu_y.size() != m || sigma_x.size() != m || sigma_y.size() != m ||
        rho.size() != m) {
      throw Error(ErrorKind::ShapeMismatch, "mixture parameter arrays differ in length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(pi[i] >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative mixture weight", 0, i);
      if (!(sigma_x[i] > 0.0) || !(sigma_y[i] > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "non-positive sigma", 0, i);
      }
      if (!(std::abs(rho[i]) < 1.0)) throw Error(ErrorKind::InvalidArgument, "|rho| must be < 1", 0, i);
      total += pi[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "mixture weights do not sum to 1");
  }
};

/// One step of raw head output (6M reals).
struct RawGmmOutput {
  std::vector<double> values;

  std::size_t components() const noexcept { return values.size() / 6; }
  std::span<const double> block(std::size_t b) const noexcept {
    const std::size_t m = components();
    return std::span<const double>(values).subspan(b * m, m);
  }
};

inline GmmParams activate(const RawGmmOutput& raw) {
  if (raw.values.empty() || raw.values.size() % 6 != 0) {
    throw Error(ErrorKind::ShapeMismatch, "raw output length must be a positive multiple of 6");
  }
  for (std::size_t k = 0; k < raw.values.size(); ++k) {
    if (!std::isfinite(raw.values[k])) throw Error(ErrorKind::NonFinite, "raw output is not finite", 0, k);
  }
  const std::size_t m = raw.components();
  GmmParams p;
  p.pi.assign(raw.block(0).begin(), raw.block(0).end());
  softmax_inplace(p.pi);
  p.mu_x.assign(raw.block(1).begin(), raw.block(1).end());
  p.mu_y.assign(raw.block(2).begin(), raw.block(2).end());
  p.sigma_x.resize(m);
  p.sigma_y.resize(m);
  p.rho.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    p.sigma_x[i] = std::exp(std::clamp(raw.block(3)[i], -kLogSigmaLimit, kLogSigmaLimit));
    p.sigma_y[i] = std::exp(std::clamp(raw.block(4)[i], -kLogSigmaLimit, kLogSigmaLimit));
    p.rho[i] = std::clamp(std::tanh(raw.block(5)[i]), -kRhoLimit, kRhoLimit);
  }
  return p;
}

namespace detail {

struct ComponentTerms {
  double log_pdf;
  double zx;
  double zy;
  double one_minus_rho2;
};

inline ComponentTerms component_terms(const GmmParams& p, std::size_t i, double x, double y) noexcept {
  const double zx = (x - p.mu_x[i]) / p.sigma_x[i];
  const double zy = (y - p.mu_y[i]) / p.sigma_y[i];
  const double r = p.rho[i];
  const double omr = 1.0 - r * r;
  const double q = zx * zx + zy * zy - 2.0 * r * zx * zy;
  const double log_pdf = -std::log(2.0 * std::numbers::pi) - std::log(p.sigma_x[i]) - std::log(p.sigma_y[i]) -
                         0.5 * std::log(omr) - q / (2.0 * omr);
  return {log_pdf, zx, zy, omr};
}

/// log p(x,y) by log-sum-exp over components. Zero-weight components are
/// skipped so they never produce log(0) * ... terms.
inline double log_density(const GmmParams& p, double x, double y) noexcept {
  std::vector<double> terms;
  terms.reserve(p.components());
  for (std::size_t i = 0; i < p.components(); ++i) {
    if (p.pi[i] > 0.0) terms.push_back(std::log(p.pi[i]) + component_terms(p, i, x, y).log_pdf);
  }
  return log_sum_exp(terms);
}

}  // namespace detail

/// Mixture density sum_i pi_i N(x, y | mu_i, sigma_i, rho_i).
inline double density(const GmmParams& p, double x, double y) {
  p.validate();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.components(); ++i) {
    acc += p.pi[i] * std::exp(detail::component_terms(p, i, x, y).log_pdf);
  }
  return acc;
}

namespace detail {

inline void check_steps(std::size_t params, std::size_t targets) {
  if (params != targets) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(params) + " mixture steps for " +
                                               std::to_string(targets) + " target points");
  }
  if (targets == 0) throw Error(ErrorKind::LengthMismatch, "no steps");
}

inline double checked_log_density(const GmmParams& p, const Point6& target, std::size_t step) {
  const double lp = log_density(p, target.x, target.y);
  if (!(lp >= std::log(kDensityFloor))) {
    throw Error(ErrorKind::ZeroDensity, "density below 1e-12 at step " + std::to_string(step), 0, step);
  }
  return lp;
}

}  // namespace detail

/// -(1/L) sum_t log p_t(x_t, y_t).
inline double loss_point(const std::vector<GmmParams>& params, const Trajectory& targets) {
  detail::check_steps(params.size(), targets.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    params[t].validate();
    acc += detail::checked_log_density(params[t], targets[t], t);
  }
  return -acc / static_cast<double>(params.size());
}

inline double loss_point(const std::vector<RawGmmOutput>& raw, const Trajectory& targets) {
  std::vector<GmmParams> params;
  params.reserve(raw.size());
  for (const auto& r : raw) params.push_back(activate(r));
  return loss_point(params, targets);
}

/// Gradient of loss_point w.r.t. every raw output (same layout as the input).
inline std::vector<RawGmmOutput> loss_point_grad(const std::vector<RawGmmOutput>& raw, const Trajectory& targets) {
  detail::check_steps(raw.size(), targets.size());
  const double inv_l = 1.0 / static_cast<double>(raw.size());
  std::vector<RawGmmOutput> grads;
  grads.reserve(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) {
    const GmmParams p = activate(raw[t]);
    const std::size_t m = p.components();
    const double x = targets[t].x;
    const double y = targets[t].y;
    const double lp = detail::checked_log_density(p, targets[t], t);

    RawGmmOutput g{std::vector<double>(6 * m, 0.0)};
    for (std::size_t i = 0; i < m; ++i) {
      const auto c = detail::component_terms(p, i, x, y);
      // responsibility gamma_i = pi_i N_i / p
      const double gamma = p.pi[i] > 0.0 ? std::exp(std::log(p.pi[i]) + c.log_pdf - lp) : 0.0;
      const double r = p.rho[i];
      const double omr = c.one_minus_rho2;
      const double ax = (c.zx - r * c.zy) / omr;
      const double ay = (c.zy - r * c.zx) / omr;
      const double q = c.zx * c.zx + c.zy * c.zy - 2.0 * r * c.zx * c.zy;

      const double dlog_mux = ax / p.sigma_x[i];
      const double dlog_muy = ay / p.sigma_y[i];
      const double dlog_lsx = -1.0 + c.zx * ax;
      const double dlog_lsy = -1.0 + c.zy * ay;
      const double dlog_rho = r / omr + c.zx * c.zy / omr - q * r / (omr * omr);

      const double lsx_raw = raw[t].block(3)[i];
      const double lsy_raw = raw[t].block(4)[i];
      const double rho_raw = raw[t].block(5)[i];
      const double th = std::tanh(rho_raw);
      const double drho = std::abs(th) > kRhoLimit ? 0.0 : 1.0 - th * th;
      const double dlsx = std::abs(lsx_raw) > kLogSigmaLimit ? 0.0 : 1.0;
      const double dlsy = std::abs(lsy_raw) > kLogSigmaLimit ? 0.0 : 1.0;

      g.values[0 * m + i] = inv_l * (p.pi[i] - gamma);
      g.values[1 * m + i] = -inv_l * gamma * dlog_mux;
      g.values[2 * m + i] = -inv_l * gamma * dlog_muy;
      g.values[3 * m + i] = -inv_l * gamma * dlog_lsx * dlsx;
      g.values[4 * m + i] = -inv_l * gamma * dlog_lsy * dlsy;
      g.values[5 * m + i] = -inv_l * gamma * dlog_rho * drho;
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

/// Draws one point: component by pi, then a correlated normal via the
/// 2x2 Cholesky factor. Deterministic for a given seed.
inline Vec2 sample(const GmmParams& p, std::uint64_t seed) {
  p.validate();
  Rng rng(seed);
  const double u = rng.uniform();
  std::size_t k = 0;
  double cum = 0.0;
  for (; k + 1 < p.components(); ++k) {
    cum += p.pi[k];
    if (u < cum) break;
  }
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  const double r = p.rho[k];
  return {p.mu_x[k] + p.sigma_x[k] * z1, p.mu_y[k] + p.sigma_y[k] * (r * z1 + std::sqrt(1.0 - r * r) * z2)};
}

using ControlLogits = std::array<double, 4>;

/// Softmax cross-entropy of the control classifier.
inline double loss_label(const ControlLogits& q, Control target) {
  for (double v : q) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "control logits must be finite");
  }
  return cross_entropy(q, static_cast<std::size_t>(target));
}

/// d loss_label / d q = softmax(q) - onehot(target).
inline ControlLogits loss_label_grad(const ControlLogits& q, Control target) {
  ControlLogits g = q;
  softmax_inplace(g);
  g[static_cast<std::size_t>(target)] -= 1.0;
  return g;
}

}  // namespace glyphforge
