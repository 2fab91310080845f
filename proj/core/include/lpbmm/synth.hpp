#pragma once

// Synthetic few-shot tasks on the unit sphere.
//
// Class centers are c_k = a·u + b·e_k with {u, e_1..e_K} orthonormal, a² = 1 - sep
// and b² = sep, so every pair of centers has cosine exactly 1 - sep. Samples are
// normalize(c_k + σ_f g) and text rows normalize(c_k + σ_t g) with g ~ N(0, I/D),
// i.e. noise vectors of roughly unit length whatever D is.

#include <cstdint>
#include <filesystem>

#include "lpbmm/data_model.hpp"
#include "lpbmm/io.hpp"
#include "lpbmm/task.hpp"

namespace lpbmm {

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t classes = 10;
  std::size_t shots = 1;
  std::size_t dim = 64;
  double separation = 0.8;
  double feature_noise = 1.5;
  double text_noise = 0.3;
  std::size_t test_per_class = 20;

  /// Throws InputError for K < 2, S < 1, D < K, separation outside (0, 1],
  /// separation < 1 with D = K, or negative noise.
  void validate() const;
};

struct SynthTask {
  TextBank text;
  TaskSplit split;
  Matrix centers;  // K×D
};

/// Deterministic in the config (same config, same task).
SynthTask synth_task(const SynthConfig& config);

/// Writes text/support/val/test files and a manifest into `dir` (created if
/// missing) and returns the manifest path.
std::filesystem::path write_task(const std::filesystem::path& dir, const SynthTask& task,
                                 std::size_t shots, std::uint64_t seed);

}  // namespace lpbmm
