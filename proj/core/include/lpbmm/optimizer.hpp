#pragma once

// Block coordinate Majorize-Minimize.
//
// Each block step minimizes the quadratic majorizer
//   L(v^j) + ∇L(v^j)ᵀ(v - v^j) + (γ/2)‖v - v^j‖²
// which is the gradient step v ← v - ∇L/γ. One outer cycle performs iter_w
// prototype steps (α held at its cycle-start value) followed by iter_α
// multiplier steps (w held at its post-loop value). BCGD is the 1/1 cycle and
// the single-block variant steps (w, α) jointly with the global constant.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lpbmm/data_model.hpp"
#include "lpbmm/loss_grad.hpp"
#include "lpbmm/stepsize.hpp"
#include "lpbmm/task.hpp"

namespace lpbmm {

/// Parameters together with their cached evaluation on one support set.
/// The visual part of the logits (F wᵀ) is kept separately so that an α-only
/// change costs O(NK). The state refers to `objective`, which must outlive it.
class ProbeState {
 public:
  ProbeState(const Objective& objective, ProbeParams params);

  const Objective& objective() const noexcept { return *objective_; }
  const ProbeParams& params() const noexcept { return params_; }
  const Evaluation& eval() const noexcept { return eval_; }
  double loss() const noexcept { return eval_.loss; }

  Matrix grad_w() const { return objective_->grad_w(eval_); }
  Vector grad_alpha() const { return objective_->grad_alpha(eval_); }

  void set_w(Matrix w);
  void set_alpha(Vector alpha);
  void set_params(ProbeParams params);

 private:
  const Objective* objective_;
  ProbeParams params_;
  Matrix visual_;
  Evaluation eval_;
};

/// w ← w - ∇_w L / γ_w. Throws NumericError if the result is not finite.
ProbeState step_block_w(ProbeState state, double gamma_w);
/// Per-class step sizes: w_k ← w_k - ∇_{w_k} L / γ_k.
ProbeState step_block_w(ProbeState state, const Vector& gamma_per_class);
/// α ← α - ∇_α L / γ_α.
ProbeState step_block_alpha(ProbeState state, double gamma_alpha);
/// (w, α) ← (w, α) - ∇L / γ. With `update_alpha` false only w moves.
ProbeState step_joint(ProbeState state, double gamma, bool update_alpha = true);

/// How the prototype step size is chosen. `fixed` uses γ_w computed once up front;
/// the adaptive modes recompute a per-class constant from the current softmax,
/// either in closed form (1/N) Σ_i (p_ik - p_ik²) or by power iteration on A_k.
enum class StepMode { fixed, adaptive_closed_form, adaptive_power };

struct FitOptions {
  CyclingConfig cycling;
  Taus taus;
  InitMode init_mode = InitMode::hard_mean;
  std::uint64_t seed = 0;
  /// Overrides InitConfig::defaults(support, init_mode, seed).
  std::optional<InitConfig> init;
  /// Overrides initialization altogether.
  std::optional<ProbeParams> initial_params;
  /// When set, α is pinned to this value for every class and never updated;
  /// the slots of α steps in a cycle become prototype steps.
  std::optional<double> frozen_alpha;
  /// Single-block strategy only: replaces 1/γ by a fixed learning rate.
  std::optional<double> learning_rate;
  StepMode step_mode = StepMode::fixed;
};

/// Runs the configured strategy for exactly `cycling.budget` updates, tracking
/// validation accuracy at initialization and after every cycle, and returns
/// the parameters with the best validation accuracy (earliest on ties).
/// Throws NumericError carrying the update index if any step goes non-finite.
FitReport fit(const TaskSplit& task, const TextBank& text, const FitOptions& options);

/// Loss trace of the single-block method against the sublinear envelope
///   L(v^j) - L(v*) ≤ γ/(2j) ‖v^0 - v*‖²,
/// with L(v*) estimated by continuing the same iteration for 50× the steps.
struct ConvergenceTrace {
  bool skipped = false;
  std::string skip_reason;
  double gamma = 0.0;
  double optimum_loss = 0.0;
  double initial_distance_sq = 0.0;
  std::vector<double> gaps;        // L(v^j) - L(v*), j = 1..J
  std::vector<double> envelope;    // γ/(2j) ‖v^0 - v*‖²
  std::vector<std::size_t> violations;  // j where gap > envelope + slack
  bool satisfied() const noexcept { return !skipped && violations.empty(); }
};

/// Checks the envelope for `iterations` steps. Skipped (not failed) unless all
/// multipliers are in the proven regime τ1, τ2, τ ≥ 2.
ConvergenceTrace convergence_rate_check(const SupportSet& support, const TextBank& text,
                                        std::size_t iterations,
                                        const Taus& taus = Taus::proven(),
                                        std::optional<ProbeParams> start = std::nullopt,
                                        double slack = 1e-12);

}  // namespace lpbmm
