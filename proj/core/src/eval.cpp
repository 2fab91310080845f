#include "lpbmm/eval.hpp"

#include <string>

#include "lpbmm/init.hpp"
#include "lpbmm/loss_grad.hpp"

namespace lpbmm {

void TaskSplit::validate(const TextBank& text) const {
  const auto check = [&](const FeatureMatrix& f, const LabelVector& y, const char* name) {
    if (f.dim() != text.dim()) {
      throw DimensionError(std::string(name) + ": feature dim " + std::to_string(f.dim()) +
                           " != text dim " + std::to_string(text.dim()));
    }
    if (static_cast<Index>(y.classes()) != text.classes()) {
      throw DimensionError(std::string(name) + ": labels declare " + std::to_string(y.classes()) +
                           " classes, text bank has " + std::to_string(text.classes()));
    }
    if (static_cast<std::size_t>(f.rows()) != y.size()) {
      throw DimensionError(std::string(name) + ": " + std::to_string(f.rows()) +
                           " embeddings but " + std::to_string(y.size()) + " labels");
    }
  };
  check(support.features(), support.labels(), "support");
  check(validation.features, validation.labels, "validation");
  if (test) check(test->features, test->labels, "test");
}

std::vector<std::uint32_t> argmax_rows(const Matrix& scores) {
  std::vector<std::uint32_t> out(static_cast<std::size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    for (Index k = 1; k < scores.cols(); ++k) {
      if (scores(i, k) > scores(i, best)) best = k;
    }
    out[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(best);
  }
  return out;
}

LabelVector predict(const FeatureMatrix& features, const Matrix& similarity,
                    const ProbeParams& params) {
  const Matrix l = logits(features, similarity, params);
  return LabelVector(argmax_rows(l), static_cast<std::size_t>(params.classes()));
}

LabelVector predict(const FeatureMatrix& features, const TextBank& text, const ProbeParams& params) {
  if (params.classes() != text.classes()) throw DimensionError("predict: K mismatch");
  return predict(features, similarity(features, text), params);
}

LabelVector training_free_predict(const SupportSet& support, const TextBank& text,
                                  const FeatureMatrix& queries) {
  ProbeParams params{init_w_hard(support), init_alpha_hard(support, text)};
  return predict(queries, text, params);
}

LabelVector training_free_predict(const TaskSplit& task, const TextBank& text,
                                  const FeatureMatrix& queries) {
  return training_free_predict(task.support, text, queries);
}

double accuracy(const LabelVector& predicted, const LabelVector& truth) {
  if (predicted.size() != truth.size()) {
    throw DimensionError("accuracy: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " labels");
  }
  if (truth.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace lpbmm
