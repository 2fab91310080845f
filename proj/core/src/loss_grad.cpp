#include "lpbmm/loss_grad.hpp"

#include <cmath>
#include <string>

namespace lpbmm {

namespace {

void check_params(Index classes, Index dim, const ProbeParams& params) {
  if (params.w.rows() != classes || params.w.cols() != dim || params.alpha.size() != classes) {
    throw DimensionError("probe params are " + std::to_string(params.w.rows()) + "x" +
                         std::to_string(params.w.cols()) + " (+" +
                         std::to_string(params.alpha.size()) + "), expected " +
                         std::to_string(classes) + "x" + std::to_string(dim));
  }
}

// R = P - Y, scaled by 1/N.
Matrix scaled_residual(const Matrix& p, const LabelVector& labels) {
  Matrix r = p;
  for (std::size_t i = 0; i < labels.size(); ++i) r(static_cast<Index>(i), labels[i]) -= 1.0;
  r /= static_cast<double>(labels.size());
  return r;
}

// Row-wise softmax of `l` into `p` (resized as needed). Returns the mean
// negative log-likelihood of `labels` when given, computed from the same
// exponentials, and 0 otherwise.
double softmax_into(const Matrix& l, Matrix& p, const LabelVector* labels) {
  if (!l.allFinite()) throw NumericError("softmax: non-finite logits");
  p.resize(l.rows(), l.cols());
  double total = 0.0;
  for (Index i = 0; i < l.rows(); ++i) {
    const double m = l.row(i).maxCoeff();
    p.row(i) = (l.row(i).array() - m).exp().matrix();
    const double z = p.row(i).sum();
    p.row(i) /= z;
    if (labels) total += std::log(z) - (l(i, (*labels)[static_cast<std::size_t>(i)]) - m);
  }
  return labels ? total / static_cast<double>(l.rows()) : 0.0;
}

}  // namespace

Matrix similarity(const FeatureMatrix& features, const TextBank& text) {
  if (features.dim() != text.dim()) {
    throw DimensionError("feature dim " + std::to_string(features.dim()) +
                         " != text dim " + std::to_string(text.dim()));
  }
  Matrix s(features.rows(), text.classes());
  s.noalias() = features.data() * text.data().transpose();
  return s;
}

Matrix logits(const FeatureMatrix& features, const Matrix& similarity, const ProbeParams& params) {
  check_params(similarity.cols(), features.dim(), params);
  if (similarity.rows() != features.rows()) {
    throw DimensionError("similarity rows do not match feature rows");
  }
  Matrix l(features.rows(), params.classes());
  l.noalias() = features.data() * params.w.transpose();
  l += similarity * params.alpha.asDiagonal();
  return l;
}

Matrix logits(const FeatureMatrix& features, const TextBank& text, const ProbeParams& params) {
  return logits(features, similarity(features, text), params);
}

SoftmaxCache softmax_rows(Matrix logits) {
  Matrix p;
  softmax_into(logits, p, nullptr);
  return {std::move(logits), std::move(p)};
}

double cross_entropy_from_logits(const Matrix& logits, const LabelVector& labels) {
  double total = 0.0;
  for (Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    total += lse - logits(i, labels[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(logits.rows());
}

double loss(const SupportSet& support, const TextBank& text, const ProbeParams& params) {
  return Objective(support, text).evaluate(params).loss;
}

Matrix grad_w(const SupportSet& support, const TextBank& text, const ProbeParams& params) {
  const Objective objective(support, text);
  return objective.grad_w(objective.evaluate(params));
}

Vector grad_alpha(const SupportSet& support, const TextBank& text, const ProbeParams& params) {
  const Objective objective(support, text);
  return objective.grad_alpha(objective.evaluate(params));
}

Objective::Objective(const SupportSet& support, const TextBank& text)
    : support_(&support), text_(&text), similarity_(lpbmm::similarity(support.features(), text)) {
  if (static_cast<Index>(support.labels().classes()) != text.classes()) {
    throw DimensionError("labels have " + std::to_string(support.labels().classes()) +
                         " classes but text bank has " + std::to_string(text.classes()));
  }
}

void Objective::check_shapes(const ProbeParams& params) const {
  check_params(classes(), dim(), params);
}

Matrix Objective::visual_logits(const Matrix& w) const {
  Matrix v;
  visual_logits_into(w, v);
  return v;
}

void Objective::visual_logits_into(const Matrix& w, Matrix& out) const {
  if (w.rows() != classes() || w.cols() != dim()) {
    throw DimensionError("prototype matrix shape mismatch");
  }
  out.resize(samples(), classes());
  out.noalias() = support_->features().data() * w.transpose();
}

Evaluation Objective::evaluate_from_visual(const Matrix& visual, const Vector& alpha) const {
  Evaluation eval;
  evaluate_from_visual_into(visual, alpha, eval);
  return eval;
}

void Objective::evaluate_from_visual_into(const Matrix& visual, const Vector& alpha,
                                          Evaluation& out) const {
  if (alpha.size() != classes()) throw DimensionError("alpha length mismatch");
  if (visual.rows() != samples() || visual.cols() != classes()) {
    throw DimensionError("visual logits shape mismatch");
  }
  Matrix& l = out.cache.logits;
  l.resize(samples(), classes());
  l.noalias() = visual + similarity_ * alpha.asDiagonal();
  out.loss = softmax_into(l, out.cache.p, &support_->labels());
  if (!std::isfinite(out.loss)) throw NumericError("objective: non-finite loss");
}

Evaluation Objective::evaluate(const ProbeParams& params) const {
  check_shapes(params);
  return evaluate_from_visual(visual_logits(params.w), params.alpha);
}

Matrix Objective::grad_w(const Evaluation& eval) const {
  const Matrix r = scaled_residual(eval.cache.p, support_->labels());
  Matrix g(classes(), dim());
  g.noalias() = r.transpose() * support_->features().data();
  return g;
}

Vector Objective::grad_alpha(const Evaluation& eval) const {
  const Matrix r = scaled_residual(eval.cache.p, support_->labels());
  return r.cwiseProduct(similarity_).colwise().sum().transpose();
}

}  // namespace lpbmm
