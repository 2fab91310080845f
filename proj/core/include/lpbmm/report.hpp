#pragma once

// JSON serialization of fit results, parameters and predictions.
//
// Output is deterministic: keys are sorted and doubles are written with
// round-trip precision. Wall-clock timings are only emitted on request so that
// repeated runs on the same inputs produce byte-identical documents.

#include <filesystem>
#include <optional>
#include <string>

#include "lpbmm/data_model.hpp"

namespace lpbmm {

struct ReportOptions {
  bool include_timings = false;
  bool include_params = false;
  int indent = 2;
  /// Accuracy of the best parameters on a held-out split, when available.
  std::optional<double> test_accuracy;
};

std::string fit_report_json(const FitReport& report, const ReportOptions& options = {});

std::string params_json(const ProbeParams& params);
/// Throws FormatError on malformed documents or inconsistent shapes.
ProbeParams parse_params_json(const std::string& text);
void write_params(const std::filesystem::path& path, const ProbeParams& params);
ProbeParams read_params(const std::filesystem::path& path);

/// {"predictions": [...], "accuracy": a} with accuracy omitted when `accuracy` < 0.
std::string predictions_json(const LabelVector& predictions, double accuracy = -1.0);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace lpbmm
