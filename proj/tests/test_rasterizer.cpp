#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "glyphforge/gradcheck.hpp"
#include "glyphforge/image.hpp"
#include "glyphforge/rasterizer.hpp"
#include "oracles.hpp"

using namespace glyphforge;

namespace {

Trajectory line(Vec2 a, Vec2 b) { return Trajectory({{a.x, a.y, Control::Draw}, {b.x, b.y, Control::EndWriting}}); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(SegmentDistance, ThreeCases) {
  const Segment s{{-1, 0}, {1, 0}, true};
  EXPECT_EQ(segment_distance({0, 0}, s), 0.0);
  EXPECT_NEAR(segment_distance({2, 1}, s), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(segment_distance({-3, 0}, s), 2.0, 1e-15);
  EXPECT_NEAR(segment_distance({0, 0.5}, s), 0.5, 1e-15);
  EXPECT_NEAR(segment_distance({2, 1}, s), oracle::sampled_segment_distance({2, 1}, {-1, 0}, {1, 0}), 1e-9);
  EXPECT_TRUE(std::isinf(segment_distance({0, 0}, Segment{{-1, 0}, {1, 0}, false})));
  EXPECT_NEAR(segment_distance({3, 4}, Segment{{0, 0}, {0, 0}, true}), 5.0, 1e-15);
}

TEST(SegmentDistance, MatchesSampledOracle) {
  Rng rng(3, 4);
  for (int k = 0; k < 500; ++k) {
    const Vec2 a{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Vec2 b{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Vec2 x{rng.uniform(-8, 8), rng.uniform(-8, 8)};
    EXPECT_NEAR(segment_distance(x, {a, b, true}), oracle::sampled_segment_distance({x.x, x.y}, {a.x, a.y}, {b.x, b.y}),
                1e-9);
  }
}

TEST(Grid, CentersAndPixelFrame) {
  const Grid g(4, 8);
  const Vec2 c = g.pixel_center(1, 2);
  EXPECT_DOUBLE_EQ(c.x, -1.0 + 5.0 / 8.0);
  EXPECT_DOUBLE_EQ(c.y, -1.0 + 3.0 / 4.0);
  const Vec2 p = g.to_pixel(c);
  EXPECT_NEAR(p.x, 2.0, 1e-12);
  EXPECT_NEAR(p.y, 1.0, 1e-12);
  EXPECT_THROW(Grid(0, 3), Error);
}

TEST(Udf, NoVisibleSegmentsIsInfinite) {
  const Trajectory t({{0, 0, Control::EndStroke}, {0.5, 0.5, Control::EndWriting}});
  const auto field = udf(t, Grid(8, 8));
  for (double v : field.values()) EXPECT_TRUE(std::isinf(v));
  const auto img = render(field, {});
  for (double v : img.values()) EXPECT_EQ(v, 0.0);
}

TEST(Udf, MidlineIsVerticalDistance) {
  const Grid g(16, 16);
  // the pixel row 7.5 line, spanning the grid
  const auto f = udf(line({-1, 0}, {1, 0}), g);
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 1; j < 15; ++j) EXPECT_NEAR(f.at(i, j), std::abs(static_cast<double>(i) - 7.5), 1e-9);
  }
  const auto ref = oracle::udf(line({-1, 0}, {1, 0}), 16, 16);
  for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(f[k], ref[k], 1e-9);
}

TEST(Udf, MinDecomposition) {
  const Grid g(12, 12);
  const auto a = line({-0.8, -0.6}, {-0.1, -0.2});
  const auto b = line({0.3, 0.4}, {0.8, 0.9});
  const Trajectory both({{-0.8, -0.6, Control::Draw},
                         {-0.1, -0.2, Control::EndStroke},
                         {0.3, 0.4, Control::Draw},
                         {0.8, 0.9, Control::EndWriting}});
  const auto fa = udf(a, g);
  const auto fb = udf(b, g);
  const auto fab = udf(both, g);
  for (std::size_t k = 0; k < fab.size(); ++k) EXPECT_EQ(fab[k], std::min(fa[k], fb[k]));
}

TEST(Udf, ConnectionsOptIn) {
  const Grid g(8, 8);
  const Trajectory t({{-0.5, 0, Control::EndStrokeConnected}, {0.5, 0, Control::EndWriting}});
  EXPECT_TRUE(std::isinf(udf(t, g, false)[0]));
  EXPECT_TRUE(std::isfinite(udf(t, g, true)[0]));
}

TEST(Udf, RandomAgainstBruteForce) {
  const Rng root(11, 5);
  for (std::uint64_t inst = 0; inst < 5; ++inst) {
    Rng rng = root.split(inst);
    const auto t = detail::random_trajectory(rng, 5, 1.0);
    const auto f = udf(t, Grid(16, 16));
    const auto ref = oracle::udf(t, 16, 16);
    for (std::size_t k = 0; k < ref.size(); ++k) {
      if (std::isinf(ref[k])) {
        EXPECT_TRUE(std::isinf(f[k]));
      } else {
        EXPECT_NEAR(f[k], ref[k], 1e-6);
      }
    }
  }
}

TEST(Render, Values) {
  DistanceField f(1, 4);
  f[0] = 2.0;
  f[1] = 0.0;
  f[2] = kInf;
  f[3] = 1e6;
  const auto img = render(f, {100.0, 2.0});
  EXPECT_EQ(img[0], 0.5);
  EXPECT_NEAR(img[1], 1.0, 1e-12);
  EXPECT_EQ(img[2], 0.0);
  EXPECT_GE(img[3], 0.0);
  EXPECT_THROW(render(f, {0.0, 2.0}), Error);
  EXPECT_THROW(render(f, {1.0, -1.0}), Error);
}

TEST(Render, Monotone) {
  Rng rng(5, 6);
  DistanceField f(1, 400);
  for (double& v : f.values()) v = rng.uniform(0.0, 10.0);
  std::sort(f.values().begin(), f.values().end());
  const auto img = render(f, {rng.uniform(0.5, 200.0), rng.uniform(0.0, 4.0)});
  for (std::size_t k = 1; k < img.size(); ++k) EXPECT_LE(img[k], img[k - 1]);
}

TEST(LossDiff, DeadRegionAndZeroTarget) {
  const Grid g(16, 16);
  const auto t = line({-0.5, 0}, {0.5, 0});
  const GlyphImage full(16, 16, 1.0);
  const auto inside = loss_diff(t, full, g, {});
  EXPECT_EQ(inside.value, 0.0);
  for (const auto& gr : inside.grad) {
    EXPECT_EQ(gr.x, 0.0);
    EXPECT_EQ(gr.y, 0.0);
  }
  const GlyphImage empty(16, 16, 0.0);
  const auto img = render(udf(t, g), {});
  double sq = 0.0;
  for (double v : img.values()) sq += v * v;
  const auto out = loss_diff(t, empty, g, {});
  EXPECT_GT(out.value, 0.0);
  EXPECT_NEAR(out.value, sq, 1e-12);
  EXPECT_THROW(loss_diff(t, GlyphImage(8, 16), g, {}), Error);
}

TEST(LossDiff, SelfConsistent) {
  const Rng root(2, 9);
  const Grid g(24, 24);
  for (std::uint64_t k = 0; k < 10; ++k) {
    Rng rng = root.split(k);
    const auto t = detail::random_trajectory(rng, 6, 0.9);
    EXPECT_EQ(loss_diff(t, render(udf(t, g), {}), g, {}).value, 0.0);
  }
}

TEST(LossDiff, GradientSuite) {
  const auto rep = gradcheck_rasterizer({1, 50, false});
  EXPECT_TRUE(rep.passed()) << rep.max_rel_error;
  EXPECT_GT(rep.checked, 700u);
  EXPECT_FALSE(gradcheck_rasterizer({1, 5, true}).passed());
}

TEST(SnapFit, InsideTargetStaysPut) {
  const Grid g(16, 16);
  const auto t = line({-0.5, 0}, {0.5, 0});
  const auto r = snap_fit(t, GlyphImage(16, 16, 1.0), g, {}, 20, 0.1);
  EXPECT_EQ(r.trajectory, t);
  for (double v : r.trace) EXPECT_EQ(v, 0.0);
}

TEST(SnapFit, ZeroStepLeavesTrajectory) {
  const Grid g(16, 16);
  const auto t = line({-0.5, 0.3}, {0.5, 0.1});
  const auto r = snap_fit(t, GlyphImage(16, 16, 0.0), g, {}, 1, 0.0);
  EXPECT_EQ(r.trajectory, t);
  EXPECT_EQ(r.trace.size(), 2u);
  EXPECT_THROW(snap_fit(t, GlyphImage(16, 16), g, {}, 0, 0.1), Error);
  EXPECT_THROW(snap_fit(t, GlyphImage(16, 16), g, {}, 1, -0.1), Error);
}

TEST(SnapFit, BarFixtureConverges) {
  const auto t = parse_trajectory(slurp(GLYPHFORGE_TEST_DATA "/snap_bar_traj.txt"));
  const auto target = read_pgm(slurp(GLYPHFORGE_TEST_DATA "/snap_bar_target.pgm"));
  const auto r = snap_fit(t, target, Grid(32, 32), {0.75, 2.0}, 200, 2e-3);
  EXPECT_LT(r.trace.back(), 0.01 * r.trace.front());
  for (std::size_t k = 11; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k], r.trace[k - 1] + 1e-9) << k;
  for (const auto& p : r.trajectory.points()) {
    EXPECT_LE(std::abs(p.x), 1.0);
    EXPECT_LE(std::abs(p.y), 1.0);
  }
  EXPECT_EQ(r.trajectory[0].control, Control::Draw);
}
