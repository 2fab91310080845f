#include <gtest/gtest.h>

#include <cmath>

#include "lpbmm/data_model.hpp"

using namespace lpbmm;

TEST(FeatureMatrix, RenormalizesWithinTolerance) {
  Matrix m(2, 2);
  m << 1.0005, 0.0, 0.0, 0.9995;
  FeatureMatrix f(m);
  EXPECT_DOUBLE_EQ(f.row(0).norm(), 1.0);
  EXPECT_NEAR(f.row(1).norm(), 1.0, 1e-15);
}

TEST(FeatureMatrix, RejectsNormViolationWithRow) {
  Matrix m(3, 2);
  m << 1, 0, 0, 1, 0.5, 0;
  try {
    FeatureMatrix f(m);
    FAIL() << "expected NormError";
  } catch (const NormError& e) {
    EXPECT_EQ(e.row(), 2u);
  }
}

TEST(FeatureMatrix, RejectsNonFiniteAndEmpty) {
  Matrix m(1, 2);
  m << std::nan(""), 1.0;
  EXPECT_THROW(FeatureMatrix{m}, NumericError);
  EXPECT_THROW(FeatureMatrix{Matrix(0, 3)}, InputError);
}

TEST(LabelVector, OutOfRangeIsIndexError) {
  EXPECT_THROW(LabelVector({0, 3}, 3), IndexError);
  EXPECT_THROW(LabelVector({}, 0), InputError);
  LabelVector y({0, 2, 2}, 3);
  EXPECT_EQ(y.class_counts(), (std::vector<std::size_t>{1, 0, 2}));
}

TEST(OneHot, Rows) {
  const Matrix y = one_hot(LabelVector({1, 0}, 3));
  EXPECT_EQ(y.rows(), 2);
  EXPECT_EQ(y(0, 1), 1.0);
  EXPECT_EQ(y(1, 0), 1.0);
  EXPECT_EQ(y.sum(), 2.0);
}

TEST(SupportSet, ShotsAndBalance) {
  Matrix f = Matrix::Identity(5, 5);
  SupportSet s(FeatureMatrix(f), LabelVector({0, 0, 1, 1, 1}, 2));
  EXPECT_EQ(s.shots(), 3u);
  EXPECT_FALSE(s.balanced());
  SupportSet b(FeatureMatrix(Matrix::Identity(4, 4)), LabelVector({0, 1, 0, 1}, 2));
  EXPECT_EQ(b.shots(), 2u);
  EXPECT_TRUE(b.balanced());
  EXPECT_THROW(SupportSet(FeatureMatrix(Matrix::Identity(3, 3)), LabelVector({0, 1}, 2)), DimensionError);
}

TEST(SupportSet, EmptyClassNamed) {
  SupportSet s(FeatureMatrix(Matrix::Identity(2, 2)), LabelVector({0, 2}, 3));
  try {
    s.require_all_classes();
    FAIL();
  } catch (const EmptyClassError& e) {
    EXPECT_EQ(e.class_index(), 1u);
  }
}

TEST(InitConfig, DefaultsMatchBalancedClosedForm) {
  SupportSet s(FeatureMatrix(Matrix::Identity(6, 6)), LabelVector({0, 1, 2, 0, 1, 2}, 3));
  const InitConfig c = InitConfig::defaults(s);
  EXPECT_DOUBLE_EQ(c.lambda, 1.0 / 6.0);
  EXPECT_NEAR(c.beta, 1.0 / (250.0 * 3.0), 1e-18);
  EXPECT_NEAR(c.lambda / c.beta, 250.0 / 2.0, 1e-9);
}

TEST(CyclingConfig, Validation) {
  CyclingConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.cycle_length(), 11u);
  c.iter_w = 0;
  EXPECT_THROW(c.validate(), InputError);
  c = CyclingConfig{};
  c.budget = 5;
  EXPECT_THROW(c.validate(), InputError);
  c.strategy = CyclingStrategy::bcgd;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.effective_iter_w(), 1u);
  EXPECT_EQ(c.cycle_length(), 2u);
  c.strategy = CyclingStrategy::gd_single_block;
  c.budget = 1;
  EXPECT_NO_THROW(c.validate());
}

TEST(Parsing, RoundTrip) {
  for (auto m : {InitMode::hard_mean, InitMode::random, InitMode::zero}) {
    EXPECT_EQ(parse_init_mode(to_string(m)), m);
  }
  EXPECT_EQ(parse_init_mode("hard"), InitMode::hard_mean);
  for (auto s : {CyclingStrategy::bmm, CyclingStrategy::bcgd, CyclingStrategy::gd_single_block}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_EQ(parse_strategy("gd"), CyclingStrategy::gd_single_block);
  EXPECT_THROW(parse_strategy("adam"), InputError);
}
