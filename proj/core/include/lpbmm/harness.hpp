#pragma once

// Multi-task experiment runner: per-method accuracy over a list of tasks,
// initialization comparison and the timing benchmark.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lpbmm/data_model.hpp"
#include "lpbmm/optimizer.hpp"
#include "lpbmm/synth.hpp"
#include "lpbmm/task.hpp"

namespace lpbmm {

/// One step of the splitmix64 generator: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);
/// Seed for task `index` under `master`: the (index+1)-th splitmix64 output from `master`.
std::uint64_t task_seed(std::uint64_t master, std::size_t index);

/// Worker cap: LP_BMM_THREADS if set to a positive integer, else the number of
/// logical cores (at least 1).
std::size_t harness_thread_count();

struct ProtocolTask {
  std::string id;
  TextBank text;
  TaskSplit split;  // must carry a test split
};

ProtocolTask make_synthetic_task(const SynthConfig& config, std::string id = {});
/// Loads a manifest; the id is the manifest path.
ProtocolTask load_protocol_task(const std::filesystem::path& manifest);

struct MethodSpec {
  std::string name;
  FitOptions options;
  bool training_free = false;  // predict from the initialization, no fit
};

/// LP++ with the default configuration, and the α ≡ 0 linear probe.
MethodSpec lpp_method();
MethodSpec linear_probe_method();
MethodSpec training_free_method();

struct TaskOutcome {
  std::string task_id;
  std::vector<double> test_accuracy;  // one per method
  std::vector<FitReport> reports;     // one per method (empty report for training-free)
};

struct MethodSummary {
  std::string name;
  double mean = 0.0;
  double std = 0.0;  // population
};

struct ProtocolSummary {
  std::vector<MethodSummary> methods;
  std::vector<TaskOutcome> tasks;  // in input order
};

struct ProtocolConfig {
  /// 0 means harness_thread_count().
  std::size_t threads = 0;
};

/// Runs every method on every task. Each fit is sequential and the dense
/// kernels are pinned to one thread while the protocol runs, so results do not
/// depend on the worker count. Throws ProtocolError naming the failing task.
ProtocolSummary run_protocol(const std::vector<ProtocolTask>& tasks,
                             const std::vector<MethodSpec>& methods,
                             const ProtocolConfig& config = {});

struct InitComparisonRow {
  std::string task_id;
  double loss_random = 0.0;
  double loss_hard = 0.0;
  double acc_random = 0.0;
  double acc_hard = 0.0;
};

struct InitComparison {
  std::vector<InitComparisonRow> rows;
  double frac_loss_lower = 0.0;  // hard-mean loss < random loss
  double frac_acc_higher = 0.0;  // hard-mean accuracy > random accuracy
  double frac_both = 0.0;
};

/// Initial loss on the support set and test accuracy without any update, for
/// random (seeded from the task index) and hard-mean initialization.
InitComparison init_comparison(const std::vector<ProtocolTask>& tasks, std::uint64_t seed = 0);

struct BenchResult {
  std::size_t n = 0, k = 0, d = 0, budget = 0;
  double synth_seconds = 0.0;
  double spectrum_seconds = 0.0;
  double init_seconds = 0.0;
  double steps_seconds = 0.0;
  double validation_seconds = 0.0;
  double fit_seconds = 0.0;  // everything inside fit
  double final_loss = 0.0;
  std::size_t threads = 1;
};

/// Synthetic task with n support samples over k classes in dimension d (a
/// same-size validation split), then a timed fit with the default BMM cycle.
/// Throws ResourceError when allocation fails.
BenchResult timing_bench(std::size_t n, std::size_t k, std::size_t d, std::size_t budget,
                         std::uint64_t seed = 0);

std::string protocol_json(const ProtocolSummary& summary);
std::string protocol_csv(const ProtocolSummary& summary);
std::string init_comparison_json(const InitComparison& table);
std::string bench_json(const BenchResult& result);

}  // namespace lpbmm
