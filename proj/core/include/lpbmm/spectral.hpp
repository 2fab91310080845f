#pragma once

// Eigenvalue machinery behind the Lipschitz constants.
//
// The largest eigenvalue of the Gram matrix Σ_i f_i f_iᵀ is found by power
// iteration where each product is evaluated as Σ_i (f_i·x) f_i, O(ND), so the
// D×D matrix is never formed. A cyclic Jacobi eigensolver over explicitly
// formed matrices serves as the dense oracle.

#include <cstddef>
#include <span>
#include <vector>

#include "lpbmm/data_model.hpp"

namespace lpbmm {

struct GramSpectrum {
  double lambda_max = 0.0;
  std::size_t iterations_used = 0;
  bool converged = false;
};

/// out = (Σ_i f_i f_iᵀ) x = Fᵀ (F x). `scratch` must hold N values and `out`
/// D values; no heap allocation happens here.
void gram_matvec(const FeatureMatrix& features, std::span<const double> x, std::span<double> out,
                 std::span<double> scratch);

/// Same product with per-sample weights: Σ_i c_i (f_i·x) f_i.
void weighted_gram_matvec(const FeatureMatrix& features, std::span<const double> weights,
                          std::span<const double> x, std::span<double> out,
                          std::span<double> scratch);

/// Power iteration on Σ f_i f_iᵀ. Starts from a fixed pseudo-random combination
/// of the rows (e1 if that is ~0) and stops when the Rayleigh quotient changes by
/// less than `tol` relative and the residual |Ax - ρx| is below sqrt(tol)·ρ,
/// returning converged=false after `max_iter` iterations.
GramSpectrum power_iteration_gram(const FeatureMatrix& features, double tol = 1e-10,
                                  std::size_t max_iter = 200);

/// Power iteration on Σ c_i f_i f_iᵀ with nonnegative weights c_i.
GramSpectrum power_iteration_weighted_gram(const FeatureMatrix& features,
                                           std::span<const double> weights,
                                           double tol = 1e-10, std::size_t max_iter = 200);

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
std::vector<double> symmetric_eigenvalues(Matrix a, double tol = 1e-14,
                                          std::size_t max_sweeps = 100);

inline constexpr Index kDenseOracleMaxDim = 2048;

/// Eigenvalues of the explicitly formed Gram matrix, descending. Test oracle;
/// throws OracleScopeError when D > kDenseOracleMaxDim.
std::vector<double> dense_gram_eigs(const FeatureMatrix& features);

struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme eigenvalues of Diag(p) - p pᵀ for a probability vector p.
/// Throws InputError when p is off the simplex by more than 1e-9.
EigenRange gershgorin_check(std::span<const double> p);

/// Diagonal of the α-block Hessian: (1/N) Σ_i (p_ik - p_ik²) s_ik².
Vector hessian_alpha_diag(const Matrix& similarity, const Matrix& p);
Vector hessian_alpha_diag(const SupportSet& support, const TextBank& text,
                          const SoftmaxCache& cache);

/// Per-class closed-form curvature bound (1/N) Σ_i (p_ik - p_ik²) ≥ λ_max(A_k)
/// for unit-norm features, where A_k = (1/N) Σ_i (p_ik - p_ik²) f_i f_iᵀ.
Vector class_curvature_bound(const Matrix& p);

/// λ_max(A_k) for every class via weighted power iteration.
Vector class_curvature_power(const FeatureMatrix& features, const Matrix& p,
                             double tol = 1e-10, std::size_t max_iter = 200);

}  // namespace lpbmm
