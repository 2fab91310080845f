#pragma once

// Blended cross-entropy objective
//
//   l_ik = f_i·(w_k + α_k t_k),   p_i = softmax(l_i),   L = -(1/N) Σ_i ln p_{i,y_i}
//
// with closed-form block gradients
//
//   ∂L/∂w_k = (1/N) Σ_i (p_ik - y_ik) f_i
//   ∂L/∂α_k = (1/N) Σ_i (p_ik - y_ik) (f_i·t_k)
//
// The free functions recompute everything from scratch. `Objective` caches the
// N×K similarity matrix s_ik = f_i·t_k once per (features, text) pair and is
// what the optimizer uses.

#include "lpbmm/data_model.hpp"

namespace lpbmm {

/// s_ik = f_i·t_k, N×K.
Matrix similarity(const FeatureMatrix& features, const TextBank& text);

/// l_ik = f_i·w_k + α_k s_ik. Throws DimensionError on shape mismatch.
Matrix logits(const FeatureMatrix& features, const TextBank& text, const ProbeParams& params);
Matrix logits(const FeatureMatrix& features, const Matrix& similarity, const ProbeParams& params);

/// Row-wise softmax with row-max subtraction. Throws NumericError on non-finite input.
SoftmaxCache softmax_rows(Matrix logits);

double loss(const SupportSet& support, const TextBank& text, const ProbeParams& params);
Matrix grad_w(const SupportSet& support, const TextBank& text, const ProbeParams& params);
Vector grad_alpha(const SupportSet& support, const TextBank& text, const ProbeParams& params);

/// Mean negative log-likelihood of the true labels given a logit matrix, computed
/// through log-sum-exp so it stays finite for extreme logits.
double cross_entropy_from_logits(const Matrix& logits, const LabelVector& labels);

/// Everything that depends on the current parameters: logits, softmax, loss.
struct Evaluation {
  SoftmaxCache cache;
  double loss = 0.0;
};

class Objective {
 public:
  Objective(const SupportSet& support, const TextBank& text);

  const SupportSet& support() const noexcept { return *support_; }
  const TextBank& text() const noexcept { return *text_; }
  const Matrix& similarity() const noexcept { return similarity_; }
  Index samples() const noexcept { return support_->size(); }
  Index classes() const noexcept { return text_->classes(); }
  Index dim() const noexcept { return text_->dim(); }

  /// F wᵀ, the O(NKD) part of the logits.
  Matrix visual_logits(const Matrix& w) const;
  /// Same, writing into `out` so repeated calls reuse its storage.
  void visual_logits_into(const Matrix& w, Matrix& out) const;
  /// Completes visual logits with the text term and evaluates softmax and loss, O(NK).
  Evaluation evaluate_from_visual(const Matrix& visual, const Vector& alpha) const;
  void evaluate_from_visual_into(const Matrix& visual, const Vector& alpha, Evaluation& out) const;
  Evaluation evaluate(const ProbeParams& params) const;
  double value(const ProbeParams& params) const { return evaluate(params).loss; }

  Matrix grad_w(const Evaluation& eval) const;
  Vector grad_alpha(const Evaluation& eval) const;

  void check_shapes(const ProbeParams& params) const;

 private:
  const SupportSet* support_;
  const TextBank* text_;
  Matrix similarity_;
};

}  // namespace lpbmm
