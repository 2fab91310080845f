#pragma once

// Data-driven Lipschitz constants and the implied learning rates 1/γ.
//
//   γ_w = τ1/(4N) · λ_max(Σ_i f_i f_iᵀ)        (valid for τ1 ≥ 2, approximate for τ1 ≥ 1)
//   γ_α = max_k τ2/(4N) · Σ_i (f_i·t_k)²        (approximate for τ2 ≥ 1, valid for τ2 ≥ 2)
//   γ   = τ · max(γ_w, γ_α)

#include "lpbmm/data_model.hpp"
#include "lpbmm/spectral.hpp"

namespace lpbmm {

struct Taus {
  double tau1 = 1.0;
  double tau2 = 16.0;
  double tau = 1.0;

  /// Multipliers for which every block and global constant is a proven bound.
  static constexpr Taus proven() { return {2.0, 2.0, 2.0}; }
  bool proven_regime() const noexcept { return tau1 >= 2.0 && tau2 >= 2.0 && tau >= 2.0; }
};

/// γ_w from a precomputed spectrum; a non-converged spectrum falls back to the
/// trace bound λ_max ≤ N.
double gamma_w_from_spectrum(const GramSpectrum& spectrum, Index samples, double tau1);
double gamma_w(const FeatureMatrix& features, double tau1);

/// Throws DegenerateTextError when every text row is orthogonal to every feature.
double gamma_alpha_from_similarity(const Matrix& similarity, double tau2);
double gamma_alpha(const FeatureMatrix& features, const TextBank& text, double tau2);

/// Throws InputError on non-positive inputs.
double gamma_global(double gw, double ga, double tau);

/// All constants at once, computing the Gram spectrum a single time.
StepSizes compute_step_sizes(const FeatureMatrix& features, const Matrix& similarity,
                             const Taus& taus);

}  // namespace lpbmm
