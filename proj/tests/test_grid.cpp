#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "tvis/grid.hpp"

using namespace tvis;

TEST(Image, IndexingIsRowMajor) {
  Image f(2, 3);
  f(1, 2) = 7.0;
  EXPECT_EQ(f[5], 7.0);
  EXPECT_EQ(f.rows(), 2u);
  EXPECT_EQ(f.cols(), 3u);
}

TEST(Image, DataConstructorRejectsWrongSize) {
  EXPECT_THROW(Image(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(Image, ArithmeticRequiresMatchingShapes) {
  Image a(2, 2, 1.0), b(2, 3, 1.0);
  EXPECT_THROW(a += b, ShapeError);
  EXPECT_THROW(inner_product(a, b), ShapeError);
}

TEST(Image, ArithmeticIsElementwise) {
  const Image a(1, 2, std::vector<double>{1, 2});
  const Image b(1, 2, std::vector<double>{3, 5});
  EXPECT_EQ(a + b, Image(1, 2, std::vector<double>{4, 7}));
  EXPECT_EQ(b - a, Image(1, 2, std::vector<double>{2, 3}));
  EXPECT_EQ(2.0 * a, Image(1, 2, std::vector<double>{2, 4}));
  EXPECT_DOUBLE_EQ(inner_product(a, b), 13.0);
}

TEST(Norms, ThreeFourExample) {
  const Image f(1, 2, std::vector<double>{3, -4});
  const Norms n = norms(f);
  EXPECT_DOUBLE_EQ(n.l1, 7.0);
  EXPECT_DOUBLE_EQ(n.l2, 5.0);
  EXPECT_DOUBLE_EQ(n.linf, 4.0);
}

TEST(Norms, FiniteCheckCatchesNanAndInf) {
  Image f(2, 2);
  EXPECT_TRUE(all_finite(f));
  f[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(all_finite(f));
  f[3] = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(all_finite(f));
}

TEST(ZeroMean, ProjectionRemovesTheMean) {
  const Image f = tvis_test::random_image(5, 7, 3, 0.0, 10.0);
  EXPECT_FALSE(in_zero_mean_space(f));
  const Image p = zero_mean_project(f);
  EXPECT_TRUE(in_zero_mean_space(p));
  EXPECT_NEAR(mean(p), 0.0, 1e-14);
  // Idempotent and orthogonal to the ones matrix.
  EXPECT_LT(norms(zero_mean_project(p) - p).linf, 1e-14);
  EXPECT_NEAR(inner_product(p, ones(5, 7)), 0.0, 1e-12);
}

TEST(Field, ChannelLayout) {
  Field v(2, 2, 3);
  EXPECT_EQ(v.channels(), 6u);
  EXPECT_EQ(v.size(), 24u);
  v.y(1)[2] = 5.0;
  EXPECT_EQ(v[3 * 4 + 2], 5.0);
  EXPECT_EQ(v.channel(3)[2], 5.0);
}

TEST(Field, RejectsZeroDirections) { EXPECT_THROW(Field(2, 2, 0), ShapeError); }

TEST(Field, InnerProductAndNorms) {
  Field a(1, 1, 1), b(1, 1, 1);
  a[0] = 3;
  a[1] = -4;
  b[0] = 1;
  b[1] = 1;
  EXPECT_DOUBLE_EQ(inner_product(a, b), -1.0);
  EXPECT_DOUBLE_EQ(norms(a).l2, 5.0);
  EXPECT_THROW(inner_product(a, Field(1, 1, 2)), ShapeError);
}
