#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "glyphforge/losses.hpp"
#include "glyphforge/rng.hpp"
#include "oracles.hpp"

using namespace glyphforge;

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

}  // namespace

TEST(LossPixel, Examples) {
  const GlyphImage ones(4, 5, 1.0);
  const GlyphImage zeros(4, 5, 0.0);
  EXPECT_EQ(loss_pixel(ones, ones), 0.0);
  EXPECT_EQ(loss_pixel(ones, zeros), 1.0);
  EXPECT_THROW(loss_pixel(ones, GlyphImage(5, 4)), Error);
  Rng rng(1, 1);
  GlyphImage a(9, 7);
  GlyphImage b(9, 7);
  for (double& v : a.values()) v = rng.uniform();
  for (double& v : b.values()) v = rng.uniform();
  EXPECT_NEAR(loss_pixel(a, b), oracle::mae(a, b), 1e-12);
}

TEST(Gram, Examples) {
  // orthonormal columns scaled by sqrt(N)
  const double s = std::sqrt(4.0);
  const Matrix f(4, 2, std::vector<double>{s * 0.5, s * 0.5, s * 0.5, -s * 0.5, s * 0.5, s * 0.5, s * 0.5, -s * 0.5});
  const auto g = gram(f);
  EXPECT_NEAR(g(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(g(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-15);

  const Matrix row(1, 3, std::vector<double>{1, 2, 3});
  const auto outer = gram(row);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(outer(i, j), row(0, i) * row(0, j));
  }
  EXPECT_THROW(gram(Matrix(0, 3)), Error);
}

TEST(Gram, SymmetricPsdAndMatchesOracle) {
  Rng rng(2, 2);
  for (int k = 0; k < 50; ++k) {
    const auto f = random_matrix(rng, static_cast<std::size_t>(rng.uniform_int(1, 12)),
                                 static_cast<std::size_t>(rng.uniform_int(1, 8)));
    const auto g = gram(f);
    const auto want = oracle::gram(f);
    Eigen::MatrixXd e(g.rows(), g.cols());
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < g.cols(); ++j) {
        EXPECT_EQ(g(i, j), g(j, i));
        EXPECT_NEAR(g(i, j), want(i, j), 1e-12);
        e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g(i, j);
      }
    }
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e).eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(LossGram, Examples) {
  Rng rng(3, 3);
  const FeatureStack a{random_matrix(rng, 6, 3), random_matrix(rng, 4, 2)};
  const FeatureStack b{random_matrix(rng, 6, 3), random_matrix(rng, 4, 2)};
  EXPECT_EQ(loss_gram(a, a), 0.0);
  EXPECT_EQ(loss_gram({Matrix(1, 1, 3.0)}, {Matrix(1, 1, 2.0)}), 5.0);
  double want = 0.0;
  for (std::size_t l = 0; l < 2; ++l) {
    const auto ga = oracle::gram(a[l]);
    const auto gb = oracle::gram(b[l]);
    want += oracle::mean_abs_diff({ga.values().begin(), ga.values().end()}, {gb.values().begin(), gb.values().end()});
  }
  EXPECT_NEAR(loss_gram(a, b), want, 1e-10);
  EXPECT_THROW(loss_gram(a, {a[0]}), Error);
  EXPECT_THROW(loss_gram({a[0]}, {b[1]}), Error);
}

TEST(Combine, Examples) {
  LossWeights zero{0, 0, 0, 0, 0};
  EXPECT_EQ(combine_seq(1, 2, 3, zero), 0.0);
  EXPECT_EQ(combine_seq(1, 2, 3, {}), 6.0);
  EXPECT_EQ(combine_seq(2, 4, 6, {}), 2.0 * combine_seq(1, 2, 3, {}));
  EXPECT_EQ(combine_img(0.5, 0.25, {1, 1, 1, 2, 4}), 2.0);
  EXPECT_EQ(combine_total(0, 0, 0, 0, 0), 0.0);
  EXPECT_EQ(combine_total(1, 1, 1, 1, 1), 5.0);
  Rng rng(4, 4);
  double v[5];
  for (double& x : v) x = rng.normal();
  EXPECT_EQ(combine_total(v[0], v[1], v[2], v[3], v[4]), v[0] + v[1] + v[2] + v[3] + v[4]);
}

TEST(Combine, MonotoneInWeights) {
  Rng rng(5, 5);
  for (int k = 0; k < 100; ++k) {
    LossWeights w{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    const double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
    LossWeights up = w;
    up.lambda2 += rng.uniform();
    EXPECT_GE(combine_seq(a, b, c, up), combine_seq(a, b, c, w));
    up.lambda5 += rng.uniform();
    EXPECT_GE(combine_img(a, b, up), combine_img(a, b, w));
  }
  EXPECT_THROW((LossWeights{1, -1, 1, 1, 1}.validate()), Error);
}
