#include "lpbmm/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <new>
#include <sstream>
#include <thread>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "lpbmm/eval.hpp"
#include "lpbmm/init.hpp"
#include "lpbmm/io.hpp"
#include "lpbmm/loss_grad.hpp"

namespace lpbmm {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t task_seed(std::uint64_t master, std::size_t index) {
  std::uint64_t state = master;
  std::uint64_t out = 0;
  for (std::size_t i = 0; i <= index; ++i) out = splitmix64(state);
  return out;
}

std::size_t harness_thread_count() {
  if (const char* env = std::getenv("LP_BMM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

ProtocolTask make_synthetic_task(const SynthConfig& config, std::string id) {
  SynthTask t = synth_task(config);
  if (id.empty()) id = "synth-" + std::to_string(config.seed);
  return ProtocolTask{std::move(id), std::move(t.text), std::move(t.split)};
}

ProtocolTask load_protocol_task(const std::filesystem::path& manifest) {
  LoadedTask t = load_task(manifest);
  return ProtocolTask{manifest.string(), std::move(t.text), std::move(t.split)};
}

MethodSpec lpp_method() { return MethodSpec{"lp++", FitOptions{}, false}; }

MethodSpec linear_probe_method() {
  MethodSpec m{"lp", FitOptions{}, false};
  m.options.frozen_alpha = 0.0;
  return m;
}

MethodSpec training_free_method() { return MethodSpec{"training-free", FitOptions{}, true}; }

namespace {

// Pins Eigen's kernels to one thread for the lifetime of the guard.
class EigenThreadGuard {
 public:
  EigenThreadGuard() : saved_(Eigen::nbThreads()) { Eigen::setNbThreads(1); }
  ~EigenThreadGuard() { Eigen::setNbThreads(saved_); }
  EigenThreadGuard(const EigenThreadGuard&) = delete;
  EigenThreadGuard& operator=(const EigenThreadGuard&) = delete;

 private:
  int saved_;
};

const LabeledSplit& test_split(const ProtocolTask& task) {
  if (!task.split.test) throw InputError("task has no test split");
  return *task.split.test;
}

TaskOutcome run_task(const ProtocolTask& task, const std::vector<MethodSpec>& methods) {
  TaskOutcome out;
  out.task_id = task.id;
  const LabeledSplit& test = test_split(task);
  for (const auto& method : methods) {
    if (method.training_free) {
      out.test_accuracy.push_back(
          accuracy(training_free_predict(task.split, task.text, test.features), test.labels));
      out.reports.emplace_back();
      continue;
    }
    FitReport report = fit(task.split, task.text, method.options);
    out.test_accuracy.push_back(accuracy(predict(test.features, task.text, report.best_params), test.labels));
    out.reports.push_back(std::move(report));
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ProtocolSummary run_protocol(const std::vector<ProtocolTask>& tasks,
                             const std::vector<MethodSpec>& methods,
                             const ProtocolConfig& config) {
  if (tasks.empty()) throw InputError("run_protocol: no tasks");
  if (methods.empty()) throw InputError("run_protocol: no methods");

  EigenThreadGuard guard;
  std::vector<TaskOutcome> outcomes(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        outcomes[i] = run_task(tasks[i], methods);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min(config.threads == 0 ? harness_thread_count() : config.threads, tasks.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw ProtocolError("task " + tasks[i].id + " failed: " + e.what(), tasks[i].id);
    }
  }

  ProtocolSummary summary;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    // Running mean and squared deviations (Welford).
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const double x = outcomes[i].test_accuracy[m];
      const double delta = x - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (x - mean);
    }
    summary.methods.push_back(
        MethodSummary{methods[m].name, mean, std::sqrt(m2 / static_cast<double>(outcomes.size()))});
  }
  summary.tasks = std::move(outcomes);
  return summary;
}

InitComparison init_comparison(const std::vector<ProtocolTask>& tasks, std::uint64_t seed) {
  InitComparison table;
  std::size_t lower = 0, higher = 0, both = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& task = tasks[i];
    const LabeledSplit& test = test_split(task);
    const SupportSet& support = task.split.support;
    const ProbeParams random_params =
        initialize(support, task.text, InitConfig::defaults(support, InitMode::random, task_seed(seed, i)));
    const ProbeParams hard_params = initialize(support, task.text, InitConfig::defaults(support));
    InitComparisonRow row;
    row.task_id = task.id;
    row.loss_random = loss(support, task.text, random_params);
    row.loss_hard = loss(support, task.text, hard_params);
    row.acc_random = accuracy(predict(test.features, task.text, random_params), test.labels);
    row.acc_hard = accuracy(training_free_predict(support, task.text, test.features), test.labels);
    const bool l = row.loss_hard < row.loss_random;
    const bool a = row.acc_hard > row.acc_random;
    lower += l;
    higher += a;
    both += l && a;
    table.rows.push_back(std::move(row));
  }
  if (!tasks.empty()) {
    const double n = static_cast<double>(tasks.size());
    table.frac_loss_lower = static_cast<double>(lower) / n;
    table.frac_acc_higher = static_cast<double>(higher) / n;
    table.frac_both = static_cast<double>(both) / n;
  }
  return table;
}

BenchResult timing_bench(std::size_t n, std::size_t k, std::size_t d, std::size_t budget,
                         std::uint64_t seed) {
  if (k == 0 || n % k != 0) throw InputError("timing_bench: n must be a positive multiple of k");
  BenchResult r{n, k, d, budget};
  r.threads = static_cast<std::size_t>(Eigen::nbThreads());
  try {
    const auto t0 = std::chrono::steady_clock::now();
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.classes = k;
    cfg.shots = n / k;
    cfg.dim = d;
    cfg.test_per_class = 1;
    SynthTask task = synth_task(cfg);
    r.synth_seconds = seconds_since(t0);

    FitOptions options;
    options.cycling.budget = budget;
    const FitReport report = fit(task.split, task.text, options);
    r.spectrum_seconds = report.timings.spectrum_seconds;
    r.init_seconds = report.timings.init_seconds;
    r.steps_seconds = report.timings.steps_seconds;
    r.validation_seconds = report.timings.validation_seconds;
    r.fit_seconds = report.elapsed_seconds;
    r.final_loss = report.loss_trace.empty() ? report.initial_loss : report.loss_trace.back();
  } catch (const std::bad_alloc&) {
    throw ResourceError("timing_bench: allocation failed for n=" + std::to_string(n) +
                        " k=" + std::to_string(k) + " d=" + std::to_string(d));
  }
  return r;
}

std::string protocol_json(const ProtocolSummary& summary) {
  json j;
  j["methods"] = json::array();
  for (const auto& m : summary.methods) {
    j["methods"].push_back({{"name", m.name}, {"mean", m.mean}, {"std", m.std}});
  }
  j["tasks"] = json::array();
  for (const auto& t : summary.tasks) {
    j["tasks"].push_back({{"id", t.task_id}, {"test_accuracy", t.test_accuracy}});
  }
  return j.dump(2) + "\n";
}

std::string protocol_csv(const ProtocolSummary& summary) {
  std::ostringstream out;
  out.precision(17);
  out << "task";
  for (const auto& m : summary.methods) out << "," << m.name;
  out << "\n";
  for (const auto& t : summary.tasks) {
    out << t.task_id;
    for (double a : t.test_accuracy) out << "," << a;
    out << "\n";
  }
  out << "mean";
  for (const auto& m : summary.methods) out << "," << m.mean;
  out << "\nstd";
  for (const auto& m : summary.methods) out << "," << m.std;
  out << "\n";
  return out.str();
}

std::string init_comparison_json(const InitComparison& table) {
  json j;
  j["frac_loss_lower"] = table.frac_loss_lower;
  j["frac_acc_higher"] = table.frac_acc_higher;
  j["frac_both"] = table.frac_both;
  j["rows"] = json::array();
  for (const auto& r : table.rows) {
    j["rows"].push_back({{"task", r.task_id},
                         {"loss_random", r.loss_random},
                         {"loss_hard", r.loss_hard},
                         {"acc_random", r.acc_random},
                         {"acc_hard", r.acc_hard}});
  }
  return j.dump(2) + "\n";
}

std::string bench_json(const BenchResult& r) {
  json j{{"n", r.n},
         {"k", r.k},
         {"d", r.d},
         {"budget", r.budget},
         {"threads", r.threads},
         {"synth_seconds", r.synth_seconds},
         {"eigen_seconds", r.spectrum_seconds},
         {"init_seconds", r.init_seconds},
         {"steps_seconds", r.steps_seconds},
         {"validation_seconds", r.validation_seconds},
         {"fit_seconds", r.fit_seconds},
         {"final_loss", r.final_loss}};
  return j.dump(2) + "\n";
}

}  // namespace lpbmm
