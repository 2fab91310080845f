#pragma once

// Data-informed initialization.
//
// The objective splits as L = g1 + g2 with
//   g1 = -(1/N) Σ_i Σ_k y_ik l_ik + (λ/2) Σ_k ‖w_k‖²
//   g2 =  (1/N) Σ_i ln Σ_j exp(l_ij) - (λ/2) Σ_k ‖w_k‖²
// whose per-class minimizers over w_k are the hard and soft class means scaled
// by 1/(λN). The same split with (β/2)‖α‖² in place of the prototype term
// (h1, h2) gives hard and soft means of the image-text similarities for α_k.
// Initialization uses the hard means with λ = 1/N and λ/β = 250/S.

#include <cstdint>

#include "lpbmm/data_model.hpp"

namespace lpbmm {

/// Multiplier relating text and visual terms at initialization.
inline constexpr double kTextScaleNumerator = 250.0;

/// w⁰_k = Σ_i y_ik f_i. Throws EmptyClassError.
Matrix init_w_hard(const SupportSet& support);
/// α⁰_k = (250/S) Σ_i y_ik f_i·t_k. Throws EmptyClassError.
Vector init_alpha_hard(const SupportSet& support, const TextBank& text);

/// Σ_i p_ik f_i / Σ_i p_ik. Throws DegenerateWeightError when Σ_i p_ik < 1e-12.
Matrix soft_mean_w(const SupportSet& support, const SoftmaxCache& cache);
/// Σ_i p_ik (f_i·t_k) / Σ_i p_ik.
Vector soft_mean_alpha(const SupportSet& support, const TextBank& text, const SoftmaxCache& cache);

/// Hard class mean of the similarities, Σ_i y_ik s_ik / Σ_i y_ik.
Vector hard_mean_alpha(const SupportSet& support, const TextBank& text);

double g1_value(const SupportSet& support, const TextBank& text, const ProbeParams& params,
                double lambda);
double g2_value(const SupportSet& support, const TextBank& text, const ProbeParams& params,
                double lambda);
/// ∂g1/∂w_k = -(1/N) Σ_i y_ik f_i + λ w_k.
Matrix g1_grad_w(const SupportSet& support, const ProbeParams& params, double lambda);
/// argmin_w g1 = (1/(λN)) Σ_i y_ik f_i.
Matrix g1_minimizer_w(const SupportSet& support, double lambda);

double h1_value(const SupportSet& support, const TextBank& text, const ProbeParams& params,
                double beta);
double h2_value(const SupportSet& support, const TextBank& text, const ProbeParams& params,
                double beta);
/// ∂h1/∂α_k = -(1/N) Σ_i y_ik s_ik + β α_k.
Vector h1_grad_alpha(const SupportSet& support, const TextBank& text, const ProbeParams& params,
                     double beta);
/// argmin_α h1 = (1/(βN)) Σ_i y_ik s_ik.
Vector h1_minimizer_alpha(const SupportSet& support, const TextBank& text, double beta);

/// Initial parameters for the configured mode. Hard-mean uses
/// w⁰ = (1/(λN)) Σ y f and α⁰ = (1/(βN)) Σ y s; random draws w entries from
/// N(0, 1/D) with α = 0; zero sets everything to 0.
ProbeParams initialize(const SupportSet& support, const TextBank& text, const InitConfig& config);

}  // namespace lpbmm
