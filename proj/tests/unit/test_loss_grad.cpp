#include <gtest/gtest.h>

#include <cmath>

#include "lpbmm/loss_grad.hpp"
#include "support/oracles.hpp"

using namespace lpbmm;

namespace {

oracle::Rows rows_of(const Matrix& m) { return oracle::to_rows(m); }
std::vector<double> vec_of(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST(Loss, MatchesLoopOracle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    auto inst = fixtures::random_instance(rng, 12, 4, 7);
    const ProbeParams p = fixtures::random_params(rng, 4, 7, 2.0);
    const auto prob = oracle::from(inst.support, inst.text);
    EXPECT_NEAR(loss(inst.support, inst.text, p), oracle::loss(prob, rows_of(p.w), vec_of(p.alpha)), 1e-12);
    oracle::Rows gw;
    std::vector<double> ga;
    oracle::gradients(prob, rows_of(p.w), vec_of(p.alpha), gw, ga);
    const Matrix w = grad_w(inst.support, inst.text, p);
    const Vector a = grad_alpha(inst.support, inst.text, p);
    for (Index k = 0; k < 4; ++k) {
      EXPECT_NEAR(a(k), ga[k], 1e-13);
      for (Index d = 0; d < 7; ++d) EXPECT_NEAR(w(k, d), gw[k][d], 1e-13);
    }
  }
}

TEST(Loss, ZeroParametersGiveLogK) {
  std::mt19937_64 rng(2);
  for (Index k : {2, 10, 100}) {
    auto inst = fixtures::random_instance(rng, 2 * k, k, 8);
    EXPECT_NEAR(loss(inst.support, inst.text, ProbeParams::zeros(k, 8)), std::log(double(k)), 1e-12);
  }
}

TEST(Loss, StableForExtremeLogits) {
  std::mt19937_64 rng(3);
  auto inst = fixtures::random_instance(rng, 6, 3, 4);
  ProbeParams p = fixtures::random_params(rng, 3, 4, 1e4);
  const double v = loss(inst.support, inst.text, p);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GE(v, 0.0);
}

TEST(Softmax, RowsSumToOneAndRejectNonFinite) {
  Matrix l(2, 3);
  l << 1000, 999, -1000, 0, 0, 0;
  const SoftmaxCache c = softmax_rows(l);
  EXPECT_NEAR(c.p.row(0).sum(), 1.0, 1e-15);
  EXPECT_NEAR(c.p(1, 2), 1.0 / 3.0, 1e-15);
  l(0, 0) = INFINITY;
  EXPECT_THROW(softmax_rows(l), NumericError);
}

TEST(Objective, CachedEvaluationMatchesFreeFunctions) {
  std::mt19937_64 rng(5);
  auto inst = fixtures::random_instance(rng, 20, 5, 9);
  const ProbeParams p = fixtures::random_params(rng, 5, 9);
  const Objective obj(inst.support, inst.text);
  const Evaluation e = obj.evaluate(p);
  EXPECT_NEAR(e.loss, loss(inst.support, inst.text, p), 1e-14);
  EXPECT_LT((obj.grad_w(e) - grad_w(inst.support, inst.text, p)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((obj.grad_alpha(e) - grad_alpha(inst.support, inst.text, p)).cwiseAbs().maxCoeff(), 1e-15);
  const Evaluation split = obj.evaluate_from_visual(obj.visual_logits(p.w), p.alpha);
  EXPECT_EQ(split.loss, e.loss);
}

TEST(Objective, ShapeErrors) {
  std::mt19937_64 rng(6);
  auto inst = fixtures::random_instance(rng, 6, 3, 4);
  const Objective obj(inst.support, inst.text);
  EXPECT_THROW(obj.evaluate(ProbeParams::zeros(3, 5)), DimensionError);
  EXPECT_THROW(obj.evaluate(ProbeParams::zeros(2, 4)), DimensionError);
  const TextBank wrong_k(fixtures::unit_rows(rng, 4, 4));
  EXPECT_THROW(Objective(inst.support, wrong_k), DimensionError);
}

TEST(Gradient, CentralDifferences) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    auto inst = fixtures::random_instance(rng, 10, 3, 5);
    ProbeParams p = fixtures::random_params(rng, 3, 5);
    const Matrix gw = grad_w(inst.support, inst.text, p);
    const Vector ga = grad_alpha(inst.support, inst.text, p);
    const double h = 1e-5;
    auto fd = [&](double& x) {
      const double x0 = x;
      x = x0 + h;
      const double up = loss(inst.support, inst.text, p);
      x = x0 - h;
      const double dn = loss(inst.support, inst.text, p);
      x = x0;
      return (up - dn) / (2 * h);
    };
    for (Index i = 0; i < p.w.size(); ++i) EXPECT_NEAR(fd(p.w.data()[i]), gw.data()[i], 1e-8);
    for (Index i = 0; i < 3; ++i) EXPECT_NEAR(fd(p.alpha(i)), ga(i), 1e-8);
  }
}

TEST(CrossEntropy, FromLogits) {
  Matrix l(2, 2);
  l << 0, 0, 2, 0;
  const double expected = 0.5 * (std::log(2.0) + std::log(1.0 + std::exp(-2.0)));
  EXPECT_NEAR(cross_entropy_from_logits(l, LabelVector({1, 0}, 2)), expected, 1e-15);
}
