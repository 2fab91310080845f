#pragma once

#include <cstdint>
#include <vector>

#include "lpbmm/data_model.hpp"
#include "lpbmm/task.hpp"

namespace lpbmm {

/// Per-row argmax; ties go to the lowest class index.
std::vector<std::uint32_t> argmax_rows(const Matrix& scores);

/// Argmax of l_ik = f_i·(w_k + α_k t_k). Throws DimensionError on shape mismatch.
LabelVector predict(const FeatureMatrix& features, const TextBank& text, const ProbeParams& params);
LabelVector predict(const FeatureMatrix& features, const Matrix& similarity,
                    const ProbeParams& params);

/// Prediction with the hard-mean initialization and no optimization steps.
LabelVector training_free_predict(const SupportSet& support, const TextBank& text,
                                  const FeatureMatrix& queries);
LabelVector training_free_predict(const TaskSplit& task, const TextBank& text,
                                  const FeatureMatrix& queries);

/// Fraction of matching entries. Throws DimensionError on length mismatch.
double accuracy(const LabelVector& predicted, const LabelVector& truth);

}  // namespace lpbmm
