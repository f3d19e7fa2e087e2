#include <gtest/gtest.h>

#include "glyphforge/image.hpp"
#include "glyphforge/rng.hpp"
#include "glyphforge/textio.hpp"

using namespace glyphforge;

TEST(Pgm, QuantizeHalfAwayFromZero) {
  EXPECT_EQ(quantize(0.0), 0);
  EXPECT_EQ(quantize(1.0), 255);
  EXPECT_EQ(quantize(0.5), 128);  // 127.5 rounds up
  EXPECT_EQ(quantize(-0.2), 0);
  EXPECT_EQ(quantize(1.7), 255);
}

TEST(Pgm, RoundTripBothEncodings) {
  Rng rng(1, 1);
  GlyphImage img(5, 7);
  for (double& v : img.values()) v = static_cast<double>(rng.uniform_int(0, 255)) / 255.0;
  for (auto enc : {PgmEncoding::Binary, PgmEncoding::Ascii}) {
    const auto back = read_pgm(write_pgm(img, enc));
    ASSERT_TRUE(back.same_shape(img));
    for (std::size_t k = 0; k < img.size(); ++k) EXPECT_EQ(quantize(back[k]), quantize(img[k]));
  }
  EXPECT_EQ(write_pgm(img).substr(0, 11), "P5\n7 5\n255\n");
}

TEST(Pgm, CommentsAndWideMaxval) {
  const auto a = read_pgm("P2\n# made by hand\n2 1\n# max\n100\n0 100\n");
  EXPECT_EQ(a[0], 0.0);
  EXPECT_EQ(a[1], 1.0);
  const std::string wide = std::string("P5 1 1 65535\n") + '\xff' + '\x00';
  EXPECT_NEAR(read_pgm(wide)[0], 65280.0 / 65535.0, 1e-15);
  EXPECT_THROW(read_pgm("P6\n1 1\n255\n..."), Error);
  EXPECT_THROW(read_pgm("P5\n4 4\n255\nab"), Error);
  EXPECT_THROW(read_pgm("P2\n0 1\n255\n"), Error);
}

TEST(Pgm, FieldExport) {
  DistanceField f(2, 2);
  f[0] = 0.5;
  f[1] = std::numeric_limits<double>::infinity();
  f[2] = 1.0 / 3.0;
  f[3] = 2.0;
  EXPECT_EQ(write_field_ascii(f), "0.5 inf\n0.333333333 2\n");
}

TEST(FeatureMatrix, RoundTripAndErrors) {
  const Matrix m(2, 3, std::vector<double>{1, -2.5, 3e-7, 0.1, 4, 5});
  const auto text = serialize_feature_matrix(m);
  EXPECT_EQ(text, "#glyphforge-feat v1\n2 3\n1 -2.5 3e-07\n0.1 4 5\n");
  EXPECT_EQ(parse_feature_matrix(text), m);
  EXPECT_EQ(parse_feature_matrix("#glyphforge-feat v1\n# c\n2 2 1 2\n3 4\n"), Matrix(2, 2, std::vector<double>{1, 2, 3, 4}));
  EXPECT_THROW(parse_feature_matrix("#glyphforge-feat v1\n2 2\n1 2 3\n"), Error);
  EXPECT_THROW(parse_feature_matrix("#glyphforge-feat v1\n1 1\n1 2\n"), Error);
  EXPECT_THROW(parse_feature_matrix("2 2\n1 2 3 4\n"), Error);
  try {
    parse_feature_matrix("#glyphforge-feat v1\n1 2\n1\nx\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedLine);
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(GmmText, RoundTripAndErrors) {
  std::vector<RawGmmOutput> steps{{{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}}, {{-1, -2, -3, -4, -5, -6}}};
  const auto text = serialize_gmm_raw(steps);
  const auto back = parse_gmm_raw(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].values, steps[0].values);
  EXPECT_EQ(back[1].values, steps[1].values);
  EXPECT_THROW(parse_gmm_raw("#glyphforge-gmm v1\n1 2 3\n"), Error);
  EXPECT_THROW(parse_gmm_raw("#glyphforge-gmm v1\n1 2 3 4 5 6\n1 2 3 4 5 6 7 8 9 10 11 12\n"), Error);
}

TEST(IfrText, RoundTripAndErrors) {
  IfrWeights w;
  w.q_img = Matrix(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  w.k_img = Matrix(2, 3, 0.5);
  w.k_seq = Matrix(2, 1, std::vector<double>{7, 8});
  w.v_seq = Matrix(2, 1, -1.0);
  w.ln_gain = {2, 3};
  const auto back = parse_ifr_weights(serialize_ifr_weights(w));
  EXPECT_EQ(back.q_img, w.q_img);
  EXPECT_EQ(back.k_img, w.k_img);
  EXPECT_EQ(back.k_seq, w.k_seq);
  EXPECT_EQ(back.v_seq, w.v_seq);
  EXPECT_EQ(back.ln_gain, w.ln_gain);
  EXPECT_TRUE(back.ln_bias.empty());
  EXPECT_THROW(parse_ifr_weights("#glyphforge-ifr v1\nq_img 1 1\n1\n"), Error);
  EXPECT_THROW(parse_ifr_weights(serialize_ifr_weights(w) + "extra 1 1\n0\n"), Error);
}

TEST(KeyValues, Parse) {
  const auto kv = parse_key_values("# settings\ntheta = 50\n\n  w=3\ntheta=60\n");
  EXPECT_EQ(kv.at("theta"), "60");
  EXPECT_EQ(kv.at("w"), "3");
  EXPECT_THROW(parse_key_values("no equals here\n"), Error);
  EXPECT_THROW(parse_key_values("=5\n"), Error);
}
