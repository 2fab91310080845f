// lpbmm: command-line front end for fitting, predicting, sweeps, ablations,
// synthetic task generation, diagnostics and the timing benchmark.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "check.hpp"
#include "lpbmm/eval.hpp"
#include "lpbmm/harness.hpp"
#include "lpbmm/io.hpp"
#include "lpbmm/optimizer.hpp"
#include "lpbmm/report.hpp"
#include "lpbmm/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lpbmm;

namespace {

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
}

// "1e-4..1e2x7" → 7 log-spaced values from 1e-4 to 1e2.
std::vector<double> parse_grid(const std::string& spec) {
  const auto dots = spec.find("..");
  const auto x = spec.rfind('x');
  if (dots == std::string::npos || x == std::string::npos || x < dots) {
    throw InputError("grid must look like LO..HIxCOUNT, got " + spec);
  }
  double lo = 0.0, hi = 0.0;
  int count = 0;
  try {
    lo = std::stod(spec.substr(0, dots));
    hi = std::stod(spec.substr(dots + 2, x - dots - 2));
    count = std::stoi(spec.substr(x + 1));
  } catch (const std::exception&) {
    throw InputError("grid must look like LO..HIxCOUNT, got " + spec);
  }
  if (!(lo > 0) || !(hi >= lo) || count < 1) throw InputError("grid needs 0 < LO <= HI and COUNT >= 1");
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid.push_back(std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))));
  }
  return grid;
}

// Accuracy of `params` on the test split if present, else on validation.
double heldout_accuracy(const LoadedTask& t, const ProbeParams& params) {
  const LabeledSplit& split = t.split.test ? *t.split.test : t.split.validation;
  return accuracy(predict(split.features, t.text, params), split.labels);
}

struct FitFlags {
  std::string strategy = "bmm";
  std::size_t budget = 300;
  std::size_t iter_w = 10;
  std::size_t iter_alpha = 1;
  double tau1 = 1.0;
  double tau2 = 16.0;
  double tau = 1.0;
  std::string init = "hard";
  std::uint64_t seed = 0;
  std::string step_mode = "fixed";

  void add(CLI::App* app) {
    app->add_option("--strategy", strategy, "bmm | bcgd | gd")->capture_default_str();
    app->add_option("--budget", budget, "total updates")->capture_default_str();
    app->add_option("--iter-w", iter_w, "prototype steps per cycle")->capture_default_str();
    app->add_option("--iter-alpha", iter_alpha, "multiplier steps per cycle")->capture_default_str();
    app->add_option("--tau1", tau1, "prototype step multiplier")->capture_default_str();
    app->add_option("--tau2", tau2, "multiplier step multiplier")->capture_default_str();
    app->add_option("--tau", tau, "global step multiplier (gd)")->capture_default_str();
    app->add_option("--init", init, "hard | random | zero")->capture_default_str();
    app->add_option("--seed", seed, "seed for random initialization")->capture_default_str();
    app->add_option("--step-mode", step_mode, "fixed | adaptive | adaptive-power")->capture_default_str();
  }

  FitOptions options() const {
    FitOptions o;
    o.cycling.strategy = parse_strategy(strategy);
    o.cycling.budget = budget;
    o.cycling.iter_w = iter_w;
    o.cycling.iter_alpha = iter_alpha;
    o.taus = Taus{tau1, tau2, tau};
    o.init_mode = parse_init_mode(init);
    o.seed = seed;
    if (step_mode == "fixed") {
      o.step_mode = StepMode::fixed;
    } else if (step_mode == "adaptive") {
      o.step_mode = StepMode::adaptive_closed_form;
    } else if (step_mode == "adaptive-power") {
      o.step_mode = StepMode::adaptive_power;
    } else {
      throw InputError("unknown step mode " + step_mode);
    }
    return o;
  }
};

int cmd_fit(const std::string& manifest, const FitFlags& flags, const std::string& out,
            const std::string& params_out, bool timings) {
  const LoadedTask t = load_task(fs::path(manifest));
  const FitReport report = fit(t.split, t.text, flags.options());
  ReportOptions ro;
  ro.include_timings = timings;
  if (t.split.test) ro.test_accuracy = heldout_accuracy(t, report.best_params);
  emit(out, fit_report_json(report, ro));
  if (!params_out.empty()) write_params(params_out, report.best_params);
  return 0;
}

int cmd_predict(const std::string& manifest, const std::string& params_path, const std::string& out) {
  const LoadedTask t = load_task(fs::path(manifest));
  const ProbeParams params = read_params(params_path);
  if (!t.split.test) throw InputError("predict: manifest has no test split");
  const LabelVector pred = predict(t.split.test->features, t.text, params);
  emit(out, predictions_json(pred, accuracy(pred, t.split.test->labels)));
  return 0;
}

int cmd_training_free(const std::string& manifest, const std::string& out) {
  const LoadedTask t = load_task(fs::path(manifest));
  const LabeledSplit& split = t.split.test ? *t.split.test : t.split.validation;
  const LabelVector pred = training_free_predict(t.split, t.text, split.features);
  emit(out, predictions_json(pred, accuracy(pred, split.labels)));
  return 0;
}

int cmd_sweep(const std::string& manifest, const std::string& grid_spec, std::size_t budget,
              const std::string& out) {
  const LoadedTask t = load_task(fs::path(manifest));
  const std::vector<double> grid = parse_grid(grid_spec);

  FitOptions base;
  base.cycling.strategy = CyclingStrategy::gd_single_block;
  base.cycling.budget = budget;
  const FitReport lipschitz = fit(t.split, t.text, base);
  const double lipschitz_lr = 1.0 / lipschitz.steps.gamma_global;

  json rows = json::array();
  auto row = [&](double lr, const FitReport* r, bool marked, const std::string& status) {
    json j{{"lr", lr}, {"lipschitz", marked}, {"status", status}};
    if (r) {
      j["accuracy"] = heldout_accuracy(t, r->best_params);
      j["final_loss"] = r->loss_trace.back();
    }
    rows.push_back(j);
    std::cout << std::setw(12) << lr << (marked ? " *" : "  ") << "  ";
    if (r) {
      std::cout << std::fixed << std::setprecision(4) << j["accuracy"].get<double>()
                << std::defaultfloat << std::setprecision(6) << "\n";
    } else {
      std::cout << status << "\n";
    }
  };
  std::cout << "          lr     accuracy   (* = 1/gamma)\n";
  for (double lr : grid) {
    FitOptions o = base;
    o.learning_rate = lr;
    try {
      const FitReport r = fit(t.split, t.text, o);
      row(lr, &r, false, "ok");
    } catch (const NumericError& e) {
      row(lr, nullptr, false, "diverged at update " + std::to_string(e.update_index()));
    }
  }
  row(lipschitz_lr, &lipschitz, true, "ok");
  if (!out.empty()) write_text(out, json{{"budget", budget}, {"rows", rows}}.dump(2) + "\n");
  return 0;
}

int cmd_ablate(const std::string& manifest, const FitFlags& flags, const std::string& out) {
  const LoadedTask t = load_task(fs::path(manifest));
  struct Variant {
    const char* name;
    std::optional<double> frozen;
  };
  const Variant variants[] = {{"alpha=0 (linear probe)", 0.0}, {"alpha=1 fixed", 1.0}, {"alpha learned", std::nullopt}};
  json rows = json::array();
  std::cout << std::left << std::setw(26) << "variant" << std::setw(14) << "final_loss" << "accuracy\n";
  for (const auto& v : variants) {
    FitOptions o = flags.options();
    o.frozen_alpha = v.frozen;
    const FitReport r = fit(t.split, t.text, o);
    const double acc = heldout_accuracy(t, r.best_params);
    rows.push_back({{"variant", v.name}, {"final_loss", r.loss_trace.back()}, {"accuracy", acc}});
    std::cout << std::setw(26) << v.name << std::setw(14) << r.loss_trace.back() << acc << "\n";
  }
  if (!out.empty()) write_text(out, json{{"rows", rows}}.dump(2) + "\n");
  return 0;
}

int cmd_synth(const SynthConfig& cfg, const std::string& out_dir) {
  const SynthTask task = synth_task(cfg);
  std::cout << write_task(out_dir, task, cfg.shots, cfg.seed).string() << "\n";
  return 0;
}

int cmd_protocol(const SynthConfig& cfg, std::size_t tasks, std::size_t threads, const std::string& out,
                 const std::string& csv) {
  std::vector<ProtocolTask> list;
  for (std::size_t i = 0; i < tasks; ++i) {
    SynthConfig c = cfg;
    c.seed = task_seed(cfg.seed, i);
    list.push_back(make_synthetic_task(c, "task-" + std::to_string(i)));
  }
  const ProtocolSummary s =
      run_protocol(list, {lpp_method(), linear_probe_method(), training_free_method()}, ProtocolConfig{threads});
  for (const auto& m : s.methods) {
    std::cout << std::left << std::setw(16) << m.name << std::fixed << std::setprecision(4) << m.mean
              << " +- " << m.std << "\n";
  }
  if (!out.empty()) write_text(out, protocol_json(s));
  if (!csv.empty()) write_text(csv, protocol_csv(s));
  return 0;
}

int cmd_bench(std::size_t n, std::size_t k, std::size_t d, std::size_t budget, const std::string& out) {
  const BenchResult r = timing_bench(n, k, d, budget);
  std::cout << std::fixed << std::setprecision(3) << "n=" << n << " k=" << k << " d=" << d
            << " budget=" << budget << "\n"
            << "  synth " << r.synth_seconds << " s\n"
            << "  eigen " << r.spectrum_seconds << " s\n"
            << "  init  " << r.init_seconds << " s\n"
            << "  steps " << r.steps_seconds << " s\n"
            << "  val   " << r.validation_seconds << " s\n"
            << "  fit   " << r.fit_seconds << " s\n";
  if (!out.empty()) write_text(out, bench_json(r));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-shot linear probe with blended text prototypes"};
  app.require_subcommand(1);

  std::string manifest, out, params_path, params_out, grid = "1e-4..1e2x7", out_dir;
  bool timings = false;
  FitFlags flags;
  std::size_t sweep_budget = 300;

  auto* fit_cmd = app.add_subcommand("fit", "fit on a task manifest and write a report");
  fit_cmd->add_option("--manifest", manifest)->required();
  flags.add(fit_cmd);
  fit_cmd->add_option("--out", out, "report path (default stdout)");
  fit_cmd->add_option("--params-out", params_out, "write the selected parameters here");
  fit_cmd->add_flag("--timings", timings, "include wall-clock timings in the report");

  auto* predict_cmd = app.add_subcommand("predict", "predict the test split with saved parameters");
  predict_cmd->add_option("--manifest", manifest)->required();
  predict_cmd->add_option("--params", params_path)->required();
  predict_cmd->add_option("--out", out);

  auto* tf_cmd = app.add_subcommand("training-free", "predict from the initialization alone");
  tf_cmd->add_option("--manifest", manifest)->required();
  tf_cmd->add_option("--out", out);

  auto* sweep_cmd = app.add_subcommand("sweep-lr", "fixed learning-rate sweep of single-block descent");
  sweep_cmd->add_option("--manifest", manifest)->required();
  sweep_cmd->add_option("--grid", grid, "LO..HIxCOUNT, log spaced")->capture_default_str();
  sweep_cmd->add_option("--budget", sweep_budget)->capture_default_str();
  sweep_cmd->add_option("--out", out);

  auto* ablate_cmd = app.add_subcommand("ablate", "alpha = 0 / alpha = 1 / learned alpha");
  ablate_cmd->add_option("--manifest", manifest)->required();
  flags.add(ablate_cmd);
  ablate_cmd->add_option("--out", out);

  SynthConfig synth;
  auto add_synth = [&](CLI::App* cmd) {
    cmd->add_option("--seed", synth.seed)->capture_default_str();
    cmd->add_option("--k", synth.classes)->capture_default_str();
    cmd->add_option("--s", synth.shots)->capture_default_str();
    cmd->add_option("--d", synth.dim)->capture_default_str();
    cmd->add_option("--sep", synth.separation)->capture_default_str();
    cmd->add_option("--feature-noise", synth.feature_noise)->capture_default_str();
    cmd->add_option("--text-noise", synth.text_noise)->capture_default_str();
    cmd->add_option("--test-per-class", synth.test_per_class)->capture_default_str();
  };
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic task");
  add_synth(synth_cmd);
  synth_cmd->add_option("--out-dir", out_dir)->required();

  std::size_t tasks = 10, threads = 0;
  std::string csv;
  auto* protocol_cmd = app.add_subcommand("protocol", "multi-task synthetic protocol, mean +- std");
  add_synth(protocol_cmd);
  protocol_cmd->add_option("--tasks", tasks)->capture_default_str();
  protocol_cmd->add_option("--threads", threads, "0 = LP_BMM_THREADS or all cores");
  protocol_cmd->add_option("--out", out);
  protocol_cmd->add_option("--csv", csv);

  unsigned check_seed = 1;
  auto* check_cmd = app.add_subcommand("check", "built-in property diagnostics");
  check_cmd->add_option("--seed", check_seed)->capture_default_str();

  std::size_t bn = 16000, bk = 1000, bd = 1024, bbudget = 300;
  auto* bench_cmd = app.add_subcommand("bench", "timed fit on a synthetic task");
  bench_cmd->add_option("--n", bn)->capture_default_str();
  bench_cmd->add_option("--k", bk)->capture_default_str();
  bench_cmd->add_option("--d", bd)->capture_default_str();
  bench_cmd->add_option("--budget", bbudget)->capture_default_str();
  bench_cmd->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit_cmd) return cmd_fit(manifest, flags, out, params_out, timings);
    if (*predict_cmd) return cmd_predict(manifest, params_path, out);
    if (*tf_cmd) return cmd_training_free(manifest, out);
    if (*sweep_cmd) return cmd_sweep(manifest, grid, sweep_budget, out);
    if (*ablate_cmd) return cmd_ablate(manifest, flags, out);
    if (*synth_cmd) return cmd_synth(synth, out_dir);
    if (*protocol_cmd) return cmd_protocol(synth, tasks, threads, out, csv);
    if (*check_cmd) return tools::run_checks(std::cout, check_seed) ? 0 : 1;
    if (*bench_cmd) return cmd_bench(bn, bk, bd, bbudget, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
