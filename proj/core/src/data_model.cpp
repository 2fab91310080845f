#include "lpbmm/data_model.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace lpbmm {

void normalize_rows_checked(Matrix& rows, const char* what) {
  if (rows.rows() < 1 || rows.cols() < 1) {
    throw InputError(std::string(what) + ": empty matrix");
  }
  if (!rows.allFinite()) {
    throw NumericError(std::string(what) + ": non-finite entry");
  }
  for (Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
      throw NormError(std::string(what) + ": row " + std::to_string(i) +
                          " has norm " + std::to_string(norm),
                      static_cast<std::size_t>(i));
    }
    rows.row(i) /= norm;
  }
}

FeatureMatrix::FeatureMatrix(Matrix rows) : data_(std::move(rows)) {
  normalize_rows_checked(data_, "feature matrix");
}

TextBank::TextBank(Matrix rows) : data_(std::move(rows)) {
  normalize_rows_checked(data_, "text bank");
}

LabelVector::LabelVector(std::vector<std::uint32_t> labels, std::size_t classes)
    : labels_(std::move(labels)), classes_(classes) {
  if (classes_ == 0) throw InputError("label vector: zero classes");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= classes_) {
      throw IndexError("label " + std::to_string(labels_[i]) + " at position " +
                       std::to_string(i) + " out of range for " +
                       std::to_string(classes_) + " classes");
    }
  }
}

std::vector<std::size_t> LabelVector::class_counts() const {
  std::vector<std::size_t> counts(classes_, 0);
  for (auto y : labels_) ++counts[y];
  return counts;
}

Matrix one_hot(std::span<const std::uint32_t> labels, std::size_t classes) {
  Matrix y = Matrix::Zero(static_cast<Index>(labels.size()), static_cast<Index>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) {
      throw IndexError("label " + std::to_string(labels[i]) + " out of range for " +
                       std::to_string(classes) + " classes");
    }
    y(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return y;
}

Matrix one_hot(const LabelVector& labels) { return one_hot(labels.values(), labels.classes()); }

SupportSet::SupportSet(FeatureMatrix features, LabelVector labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw DimensionError("support set: " + std::to_string(features_.rows()) +
                         " feature rows but " + std::to_string(labels_.size()) + " labels");
  }
}

std::size_t SupportSet::shots() const noexcept {
  const std::size_t n = labels_.size();
  const std::size_t k = labels_.classes();
  return (n + k - 1) / k;
}

bool SupportSet::balanced() const {
  const auto counts = labels_.class_counts();
  for (auto c : counts) {
    if (c != counts.front()) return false;
  }
  return true;
}

void SupportSet::require_all_classes() const {
  const auto counts = labels_.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      throw EmptyClassError("class " + std::to_string(k) + " has no support samples", k);
    }
  }
}

ProbeParams ProbeParams::zeros(Index classes, Index dim) {
  return {Matrix::Zero(classes, dim), Vector::Zero(classes)};
}

bool ProbeParams::all_finite() const { return w.allFinite() && alpha.allFinite(); }

InitConfig InitConfig::defaults(const SupportSet& support, InitMode mode, std::uint64_t seed) {
  const double n = static_cast<double>(support.size());
  const double s = static_cast<double>(support.shots());
  InitConfig cfg;
  cfg.lambda = 1.0 / n;
  cfg.beta = cfg.lambda * s / 250.0;
  cfg.mode = mode;
  cfg.seed = seed;
  return cfg;
}

void CyclingConfig::validate() const {
  if (strategy == CyclingStrategy::bmm) {
    if (iter_w < 1 || iter_alpha < 1) throw InputError("iter_w and iter_alpha must be >= 1");
  }
  const std::size_t one_cycle = strategy == CyclingStrategy::gd_single_block
                                    ? 1
                                    : effective_iter_w() + effective_iter_alpha();
  if (budget < one_cycle) {
    throw InputError("budget " + std::to_string(budget) +
                     " is smaller than one cycle of updates");
  }
}

std::size_t CyclingConfig::effective_iter_w() const noexcept {
  return strategy == CyclingStrategy::bmm ? iter_w : 1;
}

std::size_t CyclingConfig::effective_iter_alpha() const noexcept {
  return strategy == CyclingStrategy::bmm ? iter_alpha : 1;
}

std::size_t CyclingConfig::cycle_length() const noexcept {
  switch (strategy) {
    case CyclingStrategy::bmm:
      return iter_w + iter_alpha;
    case CyclingStrategy::bcgd:
      return 2;
    case CyclingStrategy::gd_single_block:
      // Same validation cadence as BMM so strategies select at comparable granularity.
      return iter_w + iter_alpha;
  }
  return iter_w + iter_alpha;
}

std::string to_string(InitMode mode) {
  switch (mode) {
    case InitMode::hard_mean: return "hard";
    case InitMode::random: return "random";
    case InitMode::zero: return "zero";
  }
  return "hard";
}

std::string to_string(CyclingStrategy strategy) {
  switch (strategy) {
    case CyclingStrategy::bmm: return "bmm";
    case CyclingStrategy::bcgd: return "bcgd";
    case CyclingStrategy::gd_single_block: return "gd";
  }
  return "bmm";
}

InitMode parse_init_mode(const std::string& text) {
  if (text == "hard" || text == "hard-mean") return InitMode::hard_mean;
  if (text == "random") return InitMode::random;
  if (text == "zero") return InitMode::zero;
  throw InputError("unknown init mode '" + text + "'");
}

CyclingStrategy parse_strategy(const std::string& text) {
  if (text == "bmm") return CyclingStrategy::bmm;
  if (text == "bcgd") return CyclingStrategy::bcgd;
  if (text == "gd" || text == "gd-single-block") return CyclingStrategy::gd_single_block;
  throw InputError("unknown strategy '" + text + "'");
}

}  // namespace lpbmm
