#pragma once

// On-disk formats.
//
// Embedding file: "LPEB", u32 version=1, u32 n, u32 d, then n·d little-endian
// float32 values row-major. Label file: "LPLB", u32 version=1, u32 n, u32 k,
// then n little-endian u32 class indices.
//
// A task manifest is a plain `key = value` text file ('#' starts a comment).
// Relative paths are resolved against the manifest's directory.
//
//   text = text.lpeb
//   support_features = support.lpeb
//   support_labels = support.lplb
//   val_features = val.lpeb
//   val_labels = val.lplb
//   test_features = test.lpeb      # optional, together with test_labels
//   test_labels = test.lplb
//   shots = 4
//   seed = 17

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "lpbmm/data_model.hpp"
#include "lpbmm/task.hpp"

namespace lpbmm {

inline constexpr std::uint32_t kFormatVersion = 1;

struct EmbeddingFile {
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  std::vector<float> payload;  // row-major, n·d
};

struct LabelFile {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::vector<std::uint32_t> payload;
};

/// Raw readers check magic, version and payload length (FormatError) but not norms.
EmbeddingFile read_embedding_file(const std::filesystem::path& path);
LabelFile read_label_file(const std::filesystem::path& path);
void write_embedding_file(const std::filesystem::path& path, const EmbeddingFile& file);
void write_label_file(const std::filesystem::path& path, const LabelFile& file);

/// Widens to double and checks unit norm per row (NormError with the row index).
Matrix to_checked_matrix(const EmbeddingFile& file);
EmbeddingFile to_embedding_file(const Matrix& rows);

FeatureMatrix load_features(const std::filesystem::path& path);
TextBank load_text_bank(const std::filesystem::path& path);
/// Throws IndexError when an index is >= k.
LabelVector load_labels(const std::filesystem::path& path);
void write_features(const std::filesystem::path& path, const Matrix& rows);
void write_labels(const std::filesystem::path& path, const LabelVector& labels);

struct TaskManifest {
  std::filesystem::path text;
  std::filesystem::path support_features;
  std::filesystem::path support_labels;
  std::filesystem::path val_features;
  std::filesystem::path val_labels;
  std::optional<std::filesystem::path> test_features;
  std::optional<std::filesystem::path> test_labels;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
};

/// Parses a manifest; paths come back absolute. Unknown keys, missing required
/// keys and malformed lines raise FormatError.
TaskManifest read_manifest(const std::filesystem::path& path);
/// Writes paths relative to the manifest directory when they live under it.
void write_manifest(const std::filesystem::path& path, const TaskManifest& manifest);

struct LoadedTask {
  TextBank text;
  TaskSplit split;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
};

/// Reads every header first and raises DimensionError on any disagreement in
/// D, K or per-split counts before loading payloads.
LoadedTask load_task(const TaskManifest& manifest);
LoadedTask load_task(const std::filesystem::path& manifest_path);

}  // namespace lpbmm
