#pragma once

// Core domain types: embeddings, labels, probe parameters and the
// configuration / report records shared by the optimizer and the harness.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lpbmm/errors.hpp"

namespace lpbmm {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Rows of embedding files must be unit norm to within this tolerance.
inline constexpr double kUnitNormTolerance = 1e-3;

/// Checks finiteness and |‖row‖ - 1| <= kUnitNormTolerance for every row, then
/// rescales each row to unit norm in place. Throws NumericError / NormError.
void normalize_rows_checked(Matrix& rows, const char* what);

/// N×D matrix of unit-norm image embeddings f_i (one per row).
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Matrix rows);

  Index rows() const noexcept { return data_.rows(); }
  Index dim() const noexcept { return data_.cols(); }
  const Matrix& data() const noexcept { return data_; }
  auto row(Index i) const { return data_.row(i); }

 private:
  Matrix data_;
};

/// K×D matrix of unit-norm class text embeddings t_k.
class TextBank {
 public:
  explicit TextBank(Matrix rows);

  Index classes() const noexcept { return data_.rows(); }
  Index dim() const noexcept { return data_.cols(); }
  const Matrix& data() const noexcept { return data_; }
  auto row(Index k) const { return data_.row(k); }

 private:
  Matrix data_;
};

/// Class indices in [0, K).
class LabelVector {
 public:
  LabelVector(std::vector<std::uint32_t> labels, std::size_t classes);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t classes() const noexcept { return classes_; }
  std::uint32_t operator[](std::size_t i) const { return labels_[i]; }
  std::span<const std::uint32_t> values() const noexcept { return labels_; }
  std::vector<std::size_t> class_counts() const;

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<std::uint32_t> labels_;
  std::size_t classes_;
};

/// N×K one-hot matrix y_ik. Throws IndexError on a label >= K.
Matrix one_hot(std::span<const std::uint32_t> labels, std::size_t classes);
Matrix one_hot(const LabelVector& labels);

/// Labeled support samples. S is N/K for balanced sets and ceil(N/K) otherwise.
class SupportSet {
 public:
  SupportSet(FeatureMatrix features, LabelVector labels);

  const FeatureMatrix& features() const noexcept { return features_; }
  const LabelVector& labels() const noexcept { return labels_; }
  Index size() const noexcept { return features_.rows(); }
  Index classes() const noexcept { return static_cast<Index>(labels_.classes()); }
  std::size_t shots() const noexcept;
  bool balanced() const;

  /// Throws EmptyClassError naming the first class without samples.
  void require_all_classes() const;

 private:
  FeatureMatrix features_;
  LabelVector labels_;
};

/// Optimization variables: prototypes w (K×D) and blending multipliers α (K).
/// α is unconstrained in sign.
struct ProbeParams {
  Matrix w;
  Vector alpha;

  static ProbeParams zeros(Index classes, Index dim);
  Index classes() const noexcept { return w.rows(); }
  Index dim() const noexcept { return w.cols(); }
  bool all_finite() const;
};

/// Logits l_ik and softmax predictions p_ik for a feature matrix.
struct SoftmaxCache {
  Matrix logits;
  Matrix p;
};

/// Block and global Lipschitz constants with the multipliers that produced them.
struct StepSizes {
  double gamma_w = 0.0;
  double gamma_alpha = 0.0;
  double gamma_global = 0.0;
  double tau1 = 1.0;
  double tau2 = 16.0;
  double tau = 1.0;
  double lambda_max = 0.0;       // largest eigenvalue of Σ f_i f_iᵀ
  bool spectrum_converged = true;
};

enum class InitMode { hard_mean, random, zero };

struct InitConfig {
  double lambda = 0.0;
  double beta = 0.0;
  InitMode mode = InitMode::hard_mean;
  std::uint64_t seed = 0;

  /// λ = 1/N and β chosen so that λ/β = 250/S, S = ceil(N/K).
  /// For balanced sets this is exactly β = 1/(250 K).
  static InitConfig defaults(const SupportSet& support,
                             InitMode mode = InitMode::hard_mean,
                             std::uint64_t seed = 0);
};

enum class CyclingStrategy { bmm, bcgd, gd_single_block };

struct CyclingConfig {
  std::size_t iter_w = 10;
  std::size_t iter_alpha = 1;
  std::size_t budget = 300;
  CyclingStrategy strategy = CyclingStrategy::bmm;

  /// Throws InputError when the invariants on the iteration counts fail.
  void validate() const;
  /// Inner-loop lengths actually used (BCGD forces 1/1).
  std::size_t effective_iter_w() const noexcept;
  std::size_t effective_iter_alpha() const noexcept;
  /// Number of updates between validation checks.
  std::size_t cycle_length() const noexcept;
};

struct PhaseTimings {
  double spectrum_seconds = 0.0;
  double init_seconds = 0.0;
  double steps_seconds = 0.0;
  double validation_seconds = 0.0;
};

struct AlphaSignStats {
  std::size_t negative_best = 0;
  std::size_t negative_final = 0;
  double min_final = 0.0;
  double max_final = 0.0;
};

struct FitReport {
  std::vector<double> loss_trace;            // after every update
  double initial_loss = 0.0;
  std::vector<double> val_acc_trace;         // at init and after every cycle
  std::vector<std::size_t> val_update_index; // updates executed at each entry
  ProbeParams best_params;
  ProbeParams final_params;
  std::size_t best_update_index = 0;
  StepSizes steps;
  CyclingStrategy strategy = CyclingStrategy::bmm;
  std::string validation_cadence;
  AlphaSignStats alpha_signs;
  PhaseTimings timings;
  double elapsed_seconds = 0.0;
};

std::string to_string(InitMode mode);
std::string to_string(CyclingStrategy strategy);
InitMode parse_init_mode(const std::string& text);
CyclingStrategy parse_strategy(const std::string& text);

}  // namespace lpbmm
