#pragma once

#include <optional>

#include "lpbmm/data_model.hpp"

namespace lpbmm {

struct LabeledSplit {
  FeatureMatrix features;
  LabelVector labels;
};

/// Support set plus a shot-sized validation split used for model selection,
/// and an optional held-out test split.
struct TaskSplit {
  SupportSet support;
  LabeledSplit validation;
  std::optional<LabeledSplit> test;

  /// Throws DimensionError when any split disagrees with the text bank on K or D
  /// or a split's feature and label counts differ.
  void validate(const TextBank& text) const;
};

}  // namespace lpbmm
