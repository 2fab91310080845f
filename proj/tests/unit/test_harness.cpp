#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "lpbmm/harness.hpp"

using namespace lpbmm;

namespace {

std::vector<ProtocolTask> synthetic_tasks(std::size_t count, std::uint64_t master, std::size_t shots = 1) {
  std::vector<ProtocolTask> tasks;
  for (std::size_t i = 0; i < count; ++i) {
    SynthConfig c;
    c.seed = task_seed(master, i);
    c.shots = shots;
    tasks.push_back(make_synthetic_task(c, "t" + std::to_string(i)));
  }
  return tasks;
}

}  // namespace

TEST(SeedExpansion, SplitMixReferenceValues) {
  std::uint64_t s = 0;
  EXPECT_EQ(splitmix64(s), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(s), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(task_seed(0, 1), 0x6e789e6aa1b965f4ULL);
  EXPECT_NE(task_seed(7, 0), task_seed(8, 0));
}

TEST(ThreadCount, EnvironmentCap) {
  setenv("LP_BMM_THREADS", "3", 1);
  EXPECT_EQ(harness_thread_count(), 3u);
  setenv("LP_BMM_THREADS", "zero", 1);
  EXPECT_GE(harness_thread_count(), 1u);
  unsetenv("LP_BMM_THREADS");
}

TEST(Protocol, SingleTaskHasZeroStd) {
  const auto s = run_protocol(synthetic_tasks(1, 1), {lpp_method()});
  EXPECT_EQ(s.methods[0].std, 0.0);
  EXPECT_EQ(s.methods[0].mean, s.tasks[0].test_accuracy[0]);
}

TEST(Protocol, DuplicatedTaskMeanEqualsSingle) {
  auto tasks = synthetic_tasks(1, 2);
  const double single = run_protocol(tasks, {lpp_method()}).methods[0].mean;
  tasks.push_back(tasks[0]);
  tasks.push_back(tasks[0]);
  const auto s = run_protocol(tasks, {lpp_method()});
  EXPECT_EQ(s.methods[0].mean, single);
  EXPECT_EQ(s.methods[0].std, 0.0);
}

TEST(Protocol, PopulationStd) {
  const auto s = run_protocol(synthetic_tasks(4, 3), {training_free_method()});
  double mean = 0.0, var = 0.0;
  for (const auto& t : s.tasks) mean += t.test_accuracy[0] / 4.0;
  for (const auto& t : s.tasks) var += (t.test_accuracy[0] - mean) * (t.test_accuracy[0] - mean) / 4.0;
  EXPECT_NEAR(s.methods[0].std, std::sqrt(var), 1e-15);
}

TEST(Protocol, ParallelEqualsSequential) {
  const auto tasks = synthetic_tasks(6, 4);
  const std::vector<MethodSpec> methods{lpp_method(), linear_probe_method()};
  const auto seq = run_protocol(tasks, methods, ProtocolConfig{1});
  const auto par = run_protocol(tasks, methods, ProtocolConfig{3});
  ASSERT_EQ(seq.tasks.size(), par.tasks.size());
  for (std::size_t i = 0; i < seq.tasks.size(); ++i) {
    EXPECT_EQ(seq.tasks[i].task_id, par.tasks[i].task_id);
    EXPECT_EQ(seq.tasks[i].test_accuracy, par.tasks[i].test_accuracy);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      EXPECT_EQ(seq.tasks[i].reports[m].loss_trace, par.tasks[i].reports[m].loss_trace);
    }
  }
  EXPECT_EQ(protocol_json(seq), protocol_json(par));
}

TEST(Protocol, FailureNamesTask) {
  auto tasks = synthetic_tasks(3, 5);
  tasks[1].split.test.reset();
  tasks[1].id = "broken";
  try {
    run_protocol(tasks, {lpp_method()}, ProtocolConfig{2});
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.task_id(), "broken");
  }
  EXPECT_THROW(run_protocol({}, {lpp_method()}), InputError);
}

TEST(Protocol, BlendedProbeBeatsLinearProbeAtOneShot) {
  const auto s = run_protocol(synthetic_tasks(10, 6), {lpp_method(), linear_probe_method()});
  EXPECT_GT(s.methods[0].mean, s.methods[1].mean);
}

TEST(InitComparison, RandomNearLogKAndHardBetter) {
  const auto table = init_comparison(synthetic_tasks(10, 7));
  for (const auto& r : table.rows) EXPECT_NEAR(r.loss_random, std::log(10.0), 0.1);
  EXPECT_GE(table.frac_both, 0.9);
}

TEST(TimingBench, ToyScale) {
  const BenchResult r = timing_bench(10, 2, 4, 300);
  EXPECT_EQ(r.n, 10u);
  EXPECT_LT(r.steps_seconds, 1.0);
  EXPECT_GE(r.spectrum_seconds, 0.0);
  EXPECT_THROW(timing_bench(10, 3, 4, 300), InputError);
}

TEST(TimingBench, StepTimeScalesWithBudget) {
  // Best of three runs per budget to damp scheduler noise.
  auto best = [](std::size_t budget) {
    double t = 1e300;
    for (int r = 0; r < 3; ++r) t = std::min(t, timing_bench(400, 20, 128, budget).steps_seconds);
    return t;
  };
  const double ratio = best(300) / best(150);
  EXPECT_GT(ratio, 2.0 / 1.3);
  EXPECT_LT(ratio, 2.0 * 1.3);
}
