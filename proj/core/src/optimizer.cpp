#include "lpbmm/optimizer.hpp"

#include <chrono>
#include <string>
#include <utility>

#include "lpbmm/eval.hpp"
#include "lpbmm/init.hpp"
#include "lpbmm/spectral.hpp"

namespace lpbmm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_positive(double gamma, const char* what) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InputError(std::string(what) + ": step constant must be positive and finite");
  }
}

}  // namespace

ProbeState::ProbeState(const Objective& objective, ProbeParams params)
    : objective_(&objective), params_(std::move(params)) {
  objective_->check_shapes(params_);
  objective_->visual_logits_into(params_.w, visual_);
  objective_->evaluate_from_visual_into(visual_, params_.alpha, eval_);
}

void ProbeState::set_w(Matrix w) {
  params_.w = std::move(w);
  objective_->visual_logits_into(params_.w, visual_);
  objective_->evaluate_from_visual_into(visual_, params_.alpha, eval_);
}

void ProbeState::set_alpha(Vector alpha) {
  params_.alpha = std::move(alpha);
  objective_->evaluate_from_visual_into(visual_, params_.alpha, eval_);
}

void ProbeState::set_params(ProbeParams params) {
  objective_->check_shapes(params);
  params_ = std::move(params);
  objective_->visual_logits_into(params_.w, visual_);
  objective_->evaluate_from_visual_into(visual_, params_.alpha, eval_);
}

ProbeState step_block_w(ProbeState state, double gamma_w) {
  require_positive(gamma_w, "step_block_w");
  Matrix w = state.params().w - state.grad_w() / gamma_w;
  if (!w.allFinite()) throw NumericError("step_block_w: non-finite prototypes");
  state.set_w(std::move(w));
  return state;
}

ProbeState step_block_w(ProbeState state, const Vector& gamma_per_class) {
  if (gamma_per_class.size() != state.params().classes()) {
    throw DimensionError("step_block_w: one step constant per class required");
  }
  for (Index k = 0; k < gamma_per_class.size(); ++k) require_positive(gamma_per_class(k), "step_block_w");
  Matrix w = state.params().w - gamma_per_class.cwiseInverse().asDiagonal() * state.grad_w();
  if (!w.allFinite()) throw NumericError("step_block_w: non-finite prototypes");
  state.set_w(std::move(w));
  return state;
}

ProbeState step_block_alpha(ProbeState state, double gamma_alpha) {
  require_positive(gamma_alpha, "step_block_alpha");
  Vector alpha = state.params().alpha - state.grad_alpha() / gamma_alpha;
  if (!alpha.allFinite()) throw NumericError("step_block_alpha: non-finite multipliers");
  state.set_alpha(std::move(alpha));
  return state;
}

ProbeState step_joint(ProbeState state, double gamma, bool update_alpha) {
  require_positive(gamma, "step_joint");
  ProbeParams next = state.params();
  next.w -= state.grad_w() / gamma;
  if (update_alpha) next.alpha -= state.grad_alpha() / gamma;
  if (!next.all_finite()) throw NumericError("step_joint: non-finite parameters");
  state.set_params(std::move(next));
  return state;
}

FitReport fit(const TaskSplit& task, const TextBank& text, const FitOptions& options) {
  const auto fit_start = Clock::now();
  task.validate(text);
  if (text.classes() < 2) throw InputError("fit: at least two classes are required");
  task.support.require_all_classes();
  const CyclingConfig& cycling = options.cycling;
  cycling.validate();

  FitReport report;
  report.strategy = cycling.strategy;

  const Objective objective(task.support, text);

  auto phase = Clock::now();
  report.steps = compute_step_sizes(task.support.features(), objective.similarity(), options.taus);
  report.timings.spectrum_seconds = seconds_since(phase);

  phase = Clock::now();
  ProbeParams start;
  if (options.initial_params) {
    start = *options.initial_params;
  } else {
    const InitConfig init =
        options.init ? *options.init
                     : InitConfig::defaults(task.support, options.init_mode, options.seed);
    start = initialize(task.support, text, init);
  }
  if (options.frozen_alpha) start.alpha = Vector::Constant(text.classes(), *options.frozen_alpha);
  ProbeState state(objective, std::move(start));
  report.timings.init_seconds = seconds_since(phase);
  report.initial_loss = state.loss();

  const Matrix val_similarity = similarity(task.validation.features, text);
  double best_acc = -1.0;
  auto check_validation = [&](std::size_t updates_done) {
    const auto t0 = Clock::now();
    const double acc = accuracy(predict(task.validation.features, val_similarity, state.params()),
                                task.validation.labels);
    report.val_acc_trace.push_back(acc);
    report.val_update_index.push_back(updates_done);
    if (acc > best_acc) {
      best_acc = acc;
      report.best_params = state.params();
      report.best_update_index = updates_done;
    }
    report.timings.validation_seconds += seconds_since(t0);
  };

  const bool alpha_learned = !options.frozen_alpha.has_value();
  const StepSizes& steps = report.steps;
  const double joint_gamma =
      options.learning_rate ? 1.0 / *options.learning_rate : steps.gamma_global;
  if (options.learning_rate) require_positive(*options.learning_rate, "learning rate");

  std::size_t done = 0;
  auto run_update = [&](auto&& step) {
    try {
      state = step(std::move(state));
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at update " + std::to_string(done + 1), done + 1);
    }
    ++done;
    report.loss_trace.push_back(state.loss());
  };
  auto w_update = [&] {
    run_update([&](ProbeState s) {
      if (options.step_mode == StepMode::fixed) return step_block_w(std::move(s), steps.gamma_w);
      const Vector curvature = options.step_mode == StepMode::adaptive_closed_form
                                   ? class_curvature_bound(s.eval().cache.p)
                                   : class_curvature_power(task.support.features(), s.eval().cache.p);
      // Never step more than 1000x further than the fixed constant allows.
      const Vector gammas = (steps.tau1 * curvature).cwiseMax(1e-3 * steps.gamma_w);
      return step_block_w(std::move(s), gammas);
    });
  };
  auto alpha_update = [&] {
    run_update([&](ProbeState s) { return step_block_alpha(std::move(s), steps.gamma_alpha); });
  };
  auto joint_update = [&] {
    run_update([&](ProbeState s) { return step_joint(std::move(s), joint_gamma, alpha_learned); });
  };

  report.loss_trace.reserve(cycling.budget);
  phase = Clock::now();
  check_validation(0);
  const std::size_t iter_w = cycling.effective_iter_w();
  const std::size_t iter_alpha = cycling.effective_iter_alpha();
  while (done < cycling.budget) {
    if (cycling.strategy == CyclingStrategy::gd_single_block) {
      for (std::size_t c = 0; c < cycling.cycle_length() && done < cycling.budget; ++c) joint_update();
    } else {
      for (std::size_t l = 0; l < iter_w && done < cycling.budget; ++l) w_update();
      for (std::size_t l = 0; l < iter_alpha && done < cycling.budget; ++l) {
        if (alpha_learned) {
          alpha_update();
        } else {
          w_update();
        }
      }
    }
    check_validation(done);
  }
  report.timings.steps_seconds = seconds_since(phase) - report.timings.validation_seconds;

  report.final_params = state.params();
  report.validation_cadence =
      "init+every-" + std::to_string(cycling.cycle_length()) + "-updates+final";
  const auto& a_best = report.best_params.alpha;
  const auto& a_final = report.final_params.alpha;
  report.alpha_signs.negative_best = static_cast<std::size_t>((a_best.array() < 0.0).count());
  report.alpha_signs.negative_final = static_cast<std::size_t>((a_final.array() < 0.0).count());
  report.alpha_signs.min_final = a_final.minCoeff();
  report.alpha_signs.max_final = a_final.maxCoeff();
  report.elapsed_seconds = seconds_since(fit_start);
  return report;
}

ConvergenceTrace convergence_rate_check(const SupportSet& support, const TextBank& text,
                                        std::size_t iterations, const Taus& taus,
                                        std::optional<ProbeParams> start, double slack) {
  ConvergenceTrace trace;
  if (!taus.proven_regime()) {
    trace.skipped = true;
    trace.skip_reason = "approximate constants (tau1, tau2, tau must all be >= 2)";
    return trace;
  }
  if (iterations < 1) throw InputError("convergence_rate_check: need at least one iteration");
  const Objective objective(support, text);
  const StepSizes steps = compute_step_sizes(support.features(), objective.similarity(), taus);
  trace.gamma = steps.gamma_global;

  ProbeParams v0 = start ? std::move(*start)
                         : initialize(support, text, InitConfig::defaults(support));
  ProbeState state(objective, v0);
  std::vector<double> losses;
  losses.reserve(iterations);
  for (std::size_t j = 0; j < iterations; ++j) {
    state = step_joint(std::move(state), trace.gamma);
    losses.push_back(state.loss());
  }
  for (std::size_t j = iterations; j < 50 * iterations; ++j) {
    state = step_joint(std::move(state), trace.gamma);
  }
  trace.optimum_loss = state.loss();
  trace.initial_distance_sq = (v0.w - state.params().w).squaredNorm() +
                              (v0.alpha - state.params().alpha).squaredNorm();
  for (std::size_t j = 1; j <= iterations; ++j) {
    const double gap = losses[j - 1] - trace.optimum_loss;
    const double bound = trace.gamma / (2.0 * static_cast<double>(j)) * trace.initial_distance_sq;
    trace.gaps.push_back(gap);
    trace.envelope.push_back(bound);
    if (gap > bound + slack) trace.violations.push_back(j);
  }
  return trace;
}

}  // namespace lpbmm
