#pragma once

// Central-difference gradient checking and the seeded suites behind
// `glyphforge gradcheck`. The finite-difference side only ever calls the
// scalar loss functions, never their gradient code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "glyphforge/format6.hpp"
#include "glyphforge/gmm.hpp"
#include "glyphforge/rasterizer.hpp"
#include "glyphforge/reprlearn.hpp"
#include "glyphforge/rng.hpp"

namespace glyphforge {

/// Relative error with an absolute floor on the denominator so that
/// components whose true value is ~0 are judged by absolute error.
inline double relative_error(double analytic, double numeric, double floor = 1e-3) noexcept {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

/// (f(x + h e_k) - f(x - h e_k)) / 2h for every k.
inline std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                              std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double orig = x[k];
    x[k] = orig + h;
    const double fp = f(x);
    x[k] = orig - h;
    const double fm = f(x);
    x[k] = orig;
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

struct GradCheckReport {
  std::string suite;
  std::size_t instances = 0;
  std::size_t checked = 0;  ///< gradient components compared
  std::size_t skipped = 0;  ///< components excluded as non-smooth within the probe step
  double max_rel_error = 0.0;
  double tolerance = 0.0;

  bool passed() const noexcept { return checked > 0 && max_rel_error < tolerance; }
};

struct GradCheckOptions {
  std::uint64_t seed = 1;
  std::size_t instances = 50;
  bool inject_fault = false;  ///< perturb analytic gradients (negative control)
};

namespace detail {

inline double corrupt(double g) noexcept { return g * 1.01 + 1e-2; }

inline Trajectory random_trajectory(Rng& rng, std::size_t n, double span) {
  std::vector<Point6> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    pts[k].x = rng.uniform(-span, span);
    pts[k].y = rng.uniform(-span, span);
    if (k + 1 == n) {
      pts[k].control = Control::EndWriting;
    } else {
      const double u = rng.uniform();
      pts[k].control = u < 0.7 ? Control::Draw : (u < 0.85 ? Control::EndStroke : Control::EndStrokeConnected);
    }
  }
  return Trajectory(std::move(pts));
}

// Per-pixel (nearest segment, side of that segment, ReLU active) pattern.
// Where it is constant over the probe interval the loss is smooth in the
// probed coordinate; the side term catches the |cross| kink at distance 0.
inline std::vector<std::ptrdiff_t> smoothness_signature(const Trajectory& t, const GlyphImage& target, const Grid& g,
                                                        const RenderParams& p) {
  auto u = udf_with_nearest(t, g);
  const auto ink = render(u.field, p);
  for (std::size_t k = 0; k < u.nearest.size(); ++k) {
    int side = 0;
    if (u.nearest[k] != kNoSegment) {
      const auto s = static_cast<std::size_t>(u.nearest[k]);
      const Vec2 x{static_cast<double>(k % g.width), static_cast<double>(k / g.width)};
      const Vec2 a = g.to_pixel(t[s].pos());
      const Vec2 b = g.to_pixel(t[s + 1].pos());
      side = cross(a - x, b - x) > 0.0 ? 1 : 0;
    }
    u.nearest[k] = 4 * (u.nearest[k] + 1) + 2 * side + (ink[k] - target[k] > 0.0 ? 1 : 0);
  }
  return u.nearest;
}

}  // namespace detail

/// loss_diff vs central differences on random 8-point trajectories over a
/// 16x16 grid.
inline GradCheckReport gradcheck_rasterizer(const GradCheckOptions& opt) {
  GradCheckReport rep{"rasterizer.loss_diff", 0, 0, 0, 0.0, 1e-4};
  const Rng root(opt.seed, 0x7261);
  const Grid grid(16, 16);
  const double h = 1e-5;
  for (std::size_t inst = 0; inst < opt.instances; ++inst) {
    Rng rng = root.split(inst);
    const Trajectory t = detail::random_trajectory(rng, 8, 0.9);
    GlyphImage target(grid.height, grid.width);
    for (double& v : target.values()) v = rng.uniform();
    const RenderParams params{rng.uniform(0.5, 4.0), rng.uniform(0.5, 2.5)};

    const auto analytic = loss_diff(t, target, grid, params);
    const auto base_sig = detail::smoothness_signature(t, target, grid, params);
    std::vector<Vec2> pos;
    for (const auto& p : t.points()) pos.push_back(p.pos());

    for (std::size_t k = 0; k < t.size(); ++k) {
      for (int axis = 0; axis < 2; ++axis) {
        auto probe = [&](double delta) {
          auto q = pos;
          (axis == 0 ? q[k].x : q[k].y) += delta;
          return t.with_positions(q);
        };
        const Trajectory plus = probe(h);
        const Trajectory minus = probe(-h);
        if (detail::smoothness_signature(plus, target, grid, params) != base_sig ||
            detail::smoothness_signature(minus, target, grid, params) != base_sig) {
          ++rep.skipped;
          continue;
        }
        const double numeric =
            (loss_diff(plus, target, grid, params).value - loss_diff(minus, target, grid, params).value) / (2.0 * h);
        double a = axis == 0 ? analytic.grad[k].x : analytic.grad[k].y;
        if (opt.inject_fault) a = detail::corrupt(a);
        rep.max_rel_error = std::max(rep.max_rel_error, relative_error(a, numeric));
        ++rep.checked;
      }
    }
    ++rep.instances;
  }
  return rep;
}

/// loss_point w.r.t. all raw head outputs (through activate).
inline GradCheckReport gradcheck_gmm(const GradCheckOptions& opt) {
  GradCheckReport rep{"gmm.loss_point", 0, 0, 0, 0.0, 1e-5};
  const Rng root(opt.seed, 0x676d6d);
  const double h = 1e-6;
  for (std::size_t inst = 0; inst < opt.instances; ++inst) {
    Rng rng = root.split(inst);
    const auto m = static_cast<std::size_t>(rng.uniform_int(1, 5));
    const auto steps = static_cast<std::size_t>(rng.uniform_int(1, 6));
    const Trajectory targets = detail::random_trajectory(rng, steps, 0.6);
    std::vector<RawGmmOutput> raw(steps, RawGmmOutput{std::vector<double>(6 * m)});
    for (auto& r : raw) {
      for (std::size_t i = 0; i < m; ++i) {
        r.values[0 * m + i] = rng.normal();
        r.values[1 * m + i] = rng.uniform(-0.5, 0.5);
        r.values[2 * m + i] = rng.uniform(-0.5, 0.5);
        r.values[3 * m + i] = rng.uniform(-1.5, 0.0);
        r.values[4 * m + i] = rng.uniform(-1.5, 0.0);
        r.values[5 * m + i] = 0.8 * rng.normal();
      }
    }
    const auto analytic = loss_point_grad(raw, targets);
    std::vector<double> flat;
    for (const auto& r : raw) flat.insert(flat.end(), r.values.begin(), r.values.end());
    auto f = [&](std::span<const double> x) {
      std::vector<RawGmmOutput> rr(steps);
      for (std::size_t s = 0; s < steps; ++s) rr[s].values.assign(x.begin() + s * 6 * m, x.begin() + (s + 1) * 6 * m);
      return loss_point(rr, targets);
    };
    const auto numeric = central_difference(f, flat, h);
    for (std::size_t k = 0; k < flat.size(); ++k) {
      double a = analytic[k / (6 * m)].values[k % (6 * m)];
      if (opt.inject_fault) a = detail::corrupt(a);
      rep.max_rel_error = std::max(rep.max_rel_error, relative_error(a, numeric[k]));
      ++rep.checked;
    }
    ++rep.instances;
  }
  return rep;
}

/// loss_nce w.r.t. both batches, compared on the unit-sphere tangent space.
inline GradCheckReport gradcheck_nce(const GradCheckOptions& opt) {
  GradCheckReport rep{"reprlearn.loss_nce", 0, 0, 0, 0.0, 1e-5};
  const Rng root(opt.seed, 0x6e6365);
  const double h = 1e-6;
  for (std::size_t inst = 0; inst < opt.instances; ++inst) {
    Rng rng = root.split(inst);
    const auto b = static_cast<std::size_t>(rng.uniform_int(2, 6));
    const auto dim = static_cast<std::size_t>(rng.uniform_int(2, 8));
    const NceConfig cfg{rng.uniform(0.5, 10.0)};
    auto unit = [&] {
      Feature v(dim);
      for (double& x : v) x = rng.normal();
      const double n = norm(v);
      for (double& x : v) x /= n;
      return v;
    };
    std::vector<Feature> img(b);
    std::vector<Feature> seq(b);
    for (auto& v : img) v = unit();
    for (auto& v : seq) v = unit();
    const auto analytic = loss_nce(img, seq, cfg);

    std::vector<double> flat;
    for (const auto& v : img) flat.insert(flat.end(), v.begin(), v.end());
    for (const auto& v : seq) flat.insert(flat.end(), v.begin(), v.end());
    auto f = [&](std::span<const double> x) {
      std::vector<Feature> a(b);
      std::vector<Feature> s(b);
      for (std::size_t i = 0; i < b; ++i) {
        a[i].assign(x.begin() + i * dim, x.begin() + (i + 1) * dim);
        s[i].assign(x.begin() + (b + i) * dim, x.begin() + (b + i + 1) * dim);
      }
      return loss_nce(a, s, cfg).value;
    };
    const auto numeric = central_difference(f, flat, h);

    for (std::size_t v = 0; v < 2 * b; ++v) {
      const Feature& u = v < b ? img[v] : seq[v - b];
      const Feature& ga = v < b ? analytic.grad_image[v] : analytic.grad_sequence[v - b];
      std::vector<double> gn(numeric.begin() + v * dim, numeric.begin() + (v + 1) * dim);
      std::vector<double> gaa = ga;
      // project both onto the tangent space at u
      const double pn = dot(gn, u);
      const double pa = dot(gaa, u);
      for (std::size_t k = 0; k < dim; ++k) {
        gn[k] -= pn * u[k];
        gaa[k] -= pa * u[k];
      }
      for (std::size_t k = 0; k < dim; ++k) {
        const double a = opt.inject_fault ? detail::corrupt(gaa[k]) : gaa[k];
        rep.max_rel_error = std::max(rep.max_rel_error, relative_error(a, gn[k]));
        ++rep.checked;
      }
    }
    ++rep.instances;
  }
  return rep;
}

}  // namespace glyphforge
