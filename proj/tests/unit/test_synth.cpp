#include <gtest/gtest.h>

#include "lpbmm/eval.hpp"
#include "lpbmm/synth.hpp"

using namespace lpbmm;

TEST(Synth, FullSeparationGivesOrthogonalCenters) {
  SynthConfig c;
  c.classes = 2;
  c.dim = 2;
  c.separation = 1.0;
  const SynthTask t = synth_task(c);
  EXPECT_NEAR(t.centers.row(0).dot(t.centers.row(1)), 0.0, 1e-14);
  EXPECT_NEAR(t.centers.row(0).norm(), 1.0, 1e-14);
}

TEST(Synth, PairwiseCosineMatchesSeparation) {
  SynthConfig c;
  c.classes = 6;
  c.dim = 20;
  c.separation = 0.3;
  const SynthTask t = synth_task(c);
  for (Index a = 0; a < 6; ++a)
    for (Index b = a + 1; b < 6; ++b) EXPECT_NEAR(t.centers.row(a).dot(t.centers.row(b)), 0.7, 1e-12);
}

TEST(Synth, Deterministic) {
  SynthConfig c;
  c.seed = 42;
  const SynthTask a = synth_task(c);
  const SynthTask b = synth_task(c);
  EXPECT_EQ(a.text.data(), b.text.data());
  EXPECT_EQ(a.split.support.features().data(), b.split.support.features().data());
  EXPECT_EQ(a.split.test->features.data(), b.split.test->features.data());
  c.seed = 43;
  EXPECT_NE(synth_task(c).text.data(), a.text.data());
}

TEST(Synth, Shapes) {
  SynthConfig c;
  c.classes = 5;
  c.shots = 3;
  c.dim = 8;
  c.test_per_class = 4;
  const SynthTask t = synth_task(c);
  EXPECT_EQ(t.split.support.size(), 15);
  EXPECT_EQ(t.split.validation.features.rows(), 15);
  EXPECT_EQ(t.split.test->features.rows(), 20);
  EXPECT_TRUE(t.split.support.balanced());
  EXPECT_EQ(t.text.classes(), 5);
}

TEST(Synth, InfeasibleConfigurations) {
  SynthConfig c;
  c.classes = 4;
  c.dim = 4;
  c.separation = 0.5;
  EXPECT_THROW(synth_task(c), InputError);
  c.separation = 1.0;
  EXPECT_NO_THROW(synth_task(c));
  c.dim = 3;
  EXPECT_THROW(synth_task(c), InputError);
  c.dim = 8;
  c.separation = 0.0;
  EXPECT_THROW(synth_task(c), InputError);
  c.separation = 1.5;
  EXPECT_THROW(synth_task(c), InputError);
  c.separation = 0.5;
  c.classes = 1;
  EXPECT_THROW(synth_task(c), InputError);
}

TEST(Synth, HighSeparationLowNoiseIsSolvedTrainingFree) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthConfig c;
    c.seed = seed;
    c.separation = 1.0;
    c.feature_noise = 0.05;
    c.text_noise = 0.05;
    const SynthTask t = synth_task(c);
    const auto& test = *t.split.test;
    EXPECT_EQ(accuracy(training_free_predict(t.split, t.text, test.features), test.labels), 1.0);
  }
}
