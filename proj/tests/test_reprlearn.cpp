#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "glyphforge/gradcheck.hpp"
#include "glyphforge/reprlearn.hpp"
#include "oracles.hpp"

using namespace glyphforge;

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

Feature random_unit(Rng& rng, std::size_t d) {
  Feature v(d);
  for (double& x : v) x = rng.normal();
  const double n = norm(v);
  for (double& x : v) x /= n;
  return v;
}

Eigen::MatrixXd random_orthogonal(Rng& rng, std::size_t d) {
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

Feature rotate(const Eigen::MatrixXd& q, const Feature& v) {
  const Eigen::VectorXd out = q * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return {out.data(), out.data() + out.size()};
}

}  // namespace

TEST(Distill, Examples) {
  DistillWeights w{Matrix(2, 4, std::vector<double>{1, 0, 0, 0, 0, 1, 0, 0}), Matrix(4, 2)};
  const auto d = distill(std::vector<double>{3, 4, 0, 0}, w);
  EXPECT_NEAR(d[0], 0.6, 1e-15);
  EXPECT_NEAR(d[1], 0.8, 1e-15);
  const auto scaled = distill(std::vector<double>{30, 40, 7, 7}, w);
  EXPECT_NEAR(scaled[0], 0.6, 1e-15);
  EXPECT_NEAR(scaled[1], 0.8, 1e-15);
  try {
    distill(std::vector<double>{0, 0, 1, 1}, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroVector);
  }
  EXPECT_THROW(distill(std::vector<double>{1, 2}, w), Error);
  EXPECT_THROW(distill(std::vector<double>{1, 2, 3}, DistillWeights{Matrix(1, 3), Matrix(3, 1)}), Error);
}

TEST(Distill, UnitNormAndScaleInvariance) {
  Rng rng(1, 2);
  for (int k = 0; k < 100; ++k) {
    const std::size_t d = 2 * static_cast<std::size_t>(rng.uniform_int(1, 8));
    DistillWeights w{random_matrix(rng, d / 2, d), random_matrix(rng, d, d / 2)};
    Feature f(d);
    for (double& x : f) x = rng.normal();
    const auto a = distill(f, w);
    EXPECT_NEAR(norm(a), 1.0, 1e-12);
    const double c = rng.uniform(0.01, 100.0);
    for (double& x : f) x *= c;
    const auto b = distill(f, w);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(Restore, LinearAndMatchesOracle) {
  DistillWeights zero{Matrix(2, 4), Matrix(4, 2)};
  for (double v : restore(std::vector<double>{0.6, 0.8}, zero)) EXPECT_EQ(v, 0.0);
  DistillWeights emb{Matrix(2, 4), Matrix(4, 2, std::vector<double>{2, 0, 0, 2, 0, 0, 0, 0})};
  EXPECT_EQ(restore(std::vector<double>{0.6, 0.8}, emb), (Feature{1.2, 1.6, 0, 0}));

  Rng rng(3, 3);
  for (int k = 0; k < 50; ++k) {
    const std::size_t d = 2 * static_cast<std::size_t>(rng.uniform_int(1, 8));
    DistillWeights w{random_matrix(rng, d / 2, d), random_matrix(rng, d, d / 2)};
    Feature u(d / 2);
    Feature v(d / 2);
    for (double& x : u) x = rng.normal();
    for (double& x : v) x = rng.normal();
    const auto ru = restore(u, w);
    const auto want = oracle::matvec(w.up, u);
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(ru[i], want[i], 1e-12);
    const double a = rng.normal();
    const double b = rng.normal();
    Feature mix(d / 2);
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * u[i] + b * v[i];
    const auto rv = restore(v, w);
    const auto rm = restore(mix, w);
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(rm[i], a * ru[i] + b * rv[i], 1e-9);
  }
}

TEST(MeanPool, AveragesRows) {
  const auto m = mean_pool(Matrix(2, 3, std::vector<double>{1, 2, 3, 3, 4, 5}));
  EXPECT_EQ(m, (Feature{2, 3, 4}));
  EXPECT_THROW(mean_pool(Matrix(0, 3)), Error);
}

TEST(Nce, Anchors) {
  Rng rng(4, 4);
  const auto u = random_unit(rng, 6);
  const auto v = random_unit(rng, 6);
  const auto one = loss_nce({u}, {v}, {});
  EXPECT_EQ(one.value, 0.0);

  const std::vector<Feature> img{{1, 0}, {0, 1}};
  EXPECT_NEAR(loss_nce(img, img, {1.0}).value, std::log(1.0 + std::exp(-1.0)), 1e-12);

  EXPECT_THROW(loss_nce({u}, {v, v}, {}), Error);
  EXPECT_THROW(loss_nce({}, {}, {}), Error);
  EXPECT_THROW(loss_nce({u}, {v}, {0.0}), Error);
  try {
    loss_nce({u, u}, {v, Feature{1, 2}}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BatchMismatch);
  }
}

TEST(Nce, RotationInvariance) {
  Rng rng(5, 5);
  for (int k = 0; k < 30; ++k) {
    const auto b = static_cast<std::size_t>(rng.uniform_int(1, 6));
    const auto d = static_cast<std::size_t>(rng.uniform_int(2, 10));
    std::vector<Feature> img(b);
    std::vector<Feature> seq(b);
    for (auto& f : img) f = random_unit(rng, d);
    for (auto& f : seq) f = random_unit(rng, d);
    const auto q = random_orthogonal(rng, d);
    std::vector<Feature> img_r(b);
    std::vector<Feature> seq_r(b);
    for (std::size_t i = 0; i < b; ++i) {
      img_r[i] = rotate(q, img[i]);
      seq_r[i] = rotate(q, seq[i]);
    }
    const NceConfig cfg{rng.uniform(0.5, 10.0)};
    EXPECT_NEAR(loss_nce(img, seq, cfg).value, loss_nce(img_r, seq_r, cfg).value, 1e-9);
  }
}

TEST(Nce, MonotoneInPositiveSimilarity) {
  // B=2 in 3D: the negative similarity stays at 0 while the positive pair
  // closes its angle.
  const Feature img0{1, 0, 0};
  const Feature img1{0, 1, 0};
  const Feature seq1{0, 1, 0};
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 10; ++k) {
    const double a = (1.0 - k / 10.0) * 1.5;
    const Feature seq0{std::cos(a), 0, std::sin(a)};
    const double l = loss_nce({img0, img1}, {seq0, seq1}, {2.0}).value;
    EXPECT_LT(l, prev);
    prev = l;
  }
}

TEST(Nce, GradientSuite) {
  const auto rep = gradcheck_nce({1, 50, false});
  EXPECT_TRUE(rep.passed()) << rep.max_rel_error;
  EXPECT_FALSE(gradcheck_nce({1, 5, true}).passed());
}

TEST(LossRec, Examples) {
  const Feature a{1, 2, 3, 4};
  const Feature b{0, 1, 2, 3};
  const Feature s{5, 6};
  EXPECT_EQ(loss_rec(a, a, s, s), 0.0);
  EXPECT_EQ(loss_rec(a, b, s, s), 4.0);
  EXPECT_THROW(loss_rec(a, s, s, s), Error);
  Rng rng(6, 6);
  Feature x(8), y(8), z(4), w(4);
  for (double& v : x) v = rng.normal();
  for (double& v : y) v = rng.normal();
  for (double& v : z) v = rng.normal();
  for (double& v : w) v = rng.normal();
  double want = 0.0;
  for (std::size_t i = 0; i < 8; ++i) want += std::pow(x[i] - y[i], 2);
  for (std::size_t i = 0; i < 4; ++i) want += std::pow(z[i] - w[i], 2);
  EXPECT_NEAR(loss_rec(x, y, z, w), want, 1e-12);
}

TEST(LossDml, Examples) {
  const std::size_t k = 5;
  StyleClassifier zero{{Matrix(k, 4), {}}, {Matrix(k, 2), {}}, {Matrix(k, 4), {}}, {Matrix(k, 2), {}}};
  const StyleFeatures f{{1, 2, 3, 4}, {0.6, 0.8}, {4, 3, 2, 1}, {0.8, 0.6}};
  EXPECT_NEAR(loss_dml(f, zero, 2), 4.0 * std::log(5.0), 1e-14);
  try {
    loss_dml(f, zero, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LabelOutOfRange);
  }

  StyleClassifier sat{{Matrix(2, 4), {50, 0}}, {Matrix(2, 2), {50, 0}}, {Matrix(2, 4), {50, 0}}, {Matrix(2, 2), {50, 0}}};
  EXPECT_LT(loss_dml(f, sat, 0), 1e-9);

  Rng rng(7, 7);
  StyleClassifier rnd{{random_matrix(rng, 3, 4), {0.1, 0.2, 0.3}},
                      {random_matrix(rng, 3, 2), {}},
                      {random_matrix(rng, 3, 4), {-0.3, 0, 0.3}},
                      {random_matrix(rng, 3, 2), {}}};
  double want = 0.0;
  auto head = [&](const AffineClassifier& c, const Feature& x) {
    auto z = oracle::matvec(c.weight, x);
    for (std::size_t i = 0; i < c.bias.size(); ++i) z[i] += c.bias[i];
    return oracle::cross_entropy(z, 1);
  };
  want += head(rnd.image, f.image) + head(rnd.image_distilled, f.image_distilled) + head(rnd.sequence, f.sequence) +
          head(rnd.sequence_distilled, f.sequence_distilled);
  EXPECT_NEAR(loss_dml(f, rnd, 1), want, 1e-10);
}
