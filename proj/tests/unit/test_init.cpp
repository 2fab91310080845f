#include <gtest/gtest.h>

#include "lpbmm/init.hpp"
#include "lpbmm/loss_grad.hpp"
#include "support/oracles.hpp"

using namespace lpbmm;

TEST(HardMean, PrototypesAreClassSums) {
  std::mt19937_64 rng(1);
  auto inst = fixtures::random_instance(rng, 9, 3, 4);
  const Matrix w = init_w_hard(inst.support);
  const auto prob = oracle::from(inst.support, inst.text);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t d = 0; d < 4; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i < 9; ++i) s += prob.y[i] == k ? prob.f[i][d] : 0.0;
      EXPECT_NEAR(w(Index(k), Index(d)), s, 1e-15);
    }
  }
}

TEST(HardMean, MultipliersScaleWithShots) {
  std::mt19937_64 rng(2);
  auto inst = fixtures::random_instance(rng, 12, 3, 5);  // S = 4
  const Vector a = init_alpha_hard(inst.support, inst.text);
  const auto prob = oracle::from(inst.support, inst.text);
  for (std::size_t k = 0; k < 3; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < 12; ++i) s += prob.y[i] == k ? oracle::dot(prob.f[i], prob.t[k]) : 0.0;
    EXPECT_NEAR(a(Index(k)), 250.0 / 4.0 * s, 1e-12);
  }
}

TEST(HardMean, InitializeMatchesClosedForms) {
  std::mt19937_64 rng(3);
  auto inst = fixtures::random_instance(rng, 8, 4, 6);
  const ProbeParams p = initialize(inst.support, inst.text, InitConfig::defaults(inst.support));
  EXPECT_LT((p.w - init_w_hard(inst.support)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((p.alpha - init_alpha_hard(inst.support, inst.text)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(G1, GradientVanishesAtClosedForm) {
  std::mt19937_64 rng(4);
  for (int seed = 0; seed < 20; ++seed) {
    auto inst = fixtures::random_instance(rng, 10, 5, 7);
    const double lambda = 0.1 + 0.05 * seed;
    ProbeParams p = ProbeParams::zeros(5, 7);
    p.w = g1_minimizer_w(inst.support, lambda);
    EXPECT_LT(g1_grad_w(inst.support, p, lambda).norm(), 1e-10);
    const double beta = 0.01 * (seed + 1);
    p.alpha = h1_minimizer_alpha(inst.support, inst.text, beta);
    EXPECT_LT(h1_grad_alpha(inst.support, inst.text, p, beta).norm(), 1e-10);
  }
}

TEST(G1, NumericalMinimizationReachesClosedForm) {
  std::mt19937_64 rng(5);
  for (int seed = 0; seed < 20; ++seed) {
    auto inst = fixtures::random_instance(rng, 12, 3, 5);
    const double lambda = 0.5;
    ProbeParams p = fixtures::random_params(rng, 3, 5);
    for (int it = 0; it < 400; ++it) p.w -= 0.5 / lambda * g1_grad_w(inst.support, p, lambda);
    EXPECT_LT((p.w - g1_minimizer_w(inst.support, lambda)).cwiseAbs().maxCoeff(), 1e-6);
    const double at_min = g1_value(inst.support, inst.text, p, lambda);
    ProbeParams q = p;
    q.w(0, 0) += 1e-3;
    EXPECT_GT(g1_value(inst.support, inst.text, q, lambda), at_min);
  }
}

TEST(G1, SplitSumsToLoss) {
  std::mt19937_64 rng(6);
  auto inst = fixtures::random_instance(rng, 9, 3, 4);
  const ProbeParams p = fixtures::random_params(rng, 3, 4);
  EXPECT_NEAR(g1_value(inst.support, inst.text, p, 0.3) + g2_value(inst.support, inst.text, p, 0.3),
              loss(inst.support, inst.text, p), 1e-12);
  EXPECT_NEAR(h1_value(inst.support, inst.text, p, 0.2) + h2_value(inst.support, inst.text, p, 0.2),
              loss(inst.support, inst.text, p), 1e-12);
}

TEST(SoftMean, WeightedAverages) {
  std::mt19937_64 rng(7);
  auto inst = fixtures::random_instance(rng, 6, 2, 3);
  Matrix pm(6, 2);
  pm.col(0).setConstant(0.25);
  pm.col(1).setConstant(0.75);
  const SoftmaxCache c{Matrix::Zero(6, 2), pm};
  const Matrix w = soft_mean_w(inst.support, c);
  const Vector mean = inst.support.features().data().colwise().mean();
  EXPECT_LT((w.row(0).transpose() - mean).norm(), 1e-14);
  pm.col(0).setZero();
  EXPECT_THROW(soft_mean_w(inst.support, SoftmaxCache{Matrix::Zero(6, 2), pm}), DegenerateWeightError);
}

TEST(Initialize, ModesAndDeterminism) {
  std::mt19937_64 rng(8);
  auto inst = fixtures::random_instance(rng, 10, 2, 16);
  const auto zero = initialize(inst.support, inst.text, InitConfig::defaults(inst.support, InitMode::zero));
  EXPECT_EQ(zero.w.squaredNorm() + zero.alpha.squaredNorm(), 0.0);
  const auto r1 = initialize(inst.support, inst.text, InitConfig::defaults(inst.support, InitMode::random, 9));
  const auto r2 = initialize(inst.support, inst.text, InitConfig::defaults(inst.support, InitMode::random, 9));
  const auto r3 = initialize(inst.support, inst.text, InitConfig::defaults(inst.support, InitMode::random, 10));
  EXPECT_EQ(r1.w, r2.w);
  EXPECT_NE(r1.w, r3.w);
  EXPECT_EQ(r1.alpha.squaredNorm(), 0.0);
}

TEST(Initialize, EmptyClassRejected) {
  std::mt19937_64 rng(9);
  SupportSet s(FeatureMatrix(fixtures::unit_rows(rng, 3, 4)), LabelVector({0, 0, 2}, 3));
  EXPECT_THROW(init_w_hard(s), EmptyClassError);
}
