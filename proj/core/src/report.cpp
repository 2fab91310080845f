#include "lpbmm/report.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lpbmm {

using nlohmann::json;

namespace {

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json params_to_json(const ProbeParams& p) {
  return json{{"classes", p.classes()}, {"dim", p.dim()}, {"w", matrix_rows(p.w)},
              {"alpha", vector_json(p.alpha)}};
}

}  // namespace

std::string fit_report_json(const FitReport& r, const ReportOptions& options) {
  json j;
  j["strategy"] = to_string(r.strategy);
  j["updates"] = r.loss_trace.size();
  j["initial_loss"] = r.initial_loss;
  j["final_loss"] = r.loss_trace.empty() ? r.initial_loss : r.loss_trace.back();
  j["loss_trace"] = r.loss_trace;
  j["val_acc_trace"] = r.val_acc_trace;
  j["val_update_index"] = r.val_update_index;
  j["validation_cadence"] = r.validation_cadence;
  j["best_update_index"] = r.best_update_index;
  j["step_sizes"] = {{"gamma_w", r.steps.gamma_w},
                     {"gamma_alpha", r.steps.gamma_alpha},
                     {"gamma_global", r.steps.gamma_global},
                     {"tau1", r.steps.tau1},
                     {"tau2", r.steps.tau2},
                     {"tau", r.steps.tau},
                     {"lambda_max", r.steps.lambda_max},
                     {"spectrum_converged", r.steps.spectrum_converged}};
  j["alpha_signs"] = {{"negative_best", r.alpha_signs.negative_best},
                      {"negative_final", r.alpha_signs.negative_final},
                      {"min_final", r.alpha_signs.min_final},
                      {"max_final", r.alpha_signs.max_final}};
  if (options.test_accuracy) j["test_accuracy"] = *options.test_accuracy;
  if (options.include_params) {
    j["best_params"] = params_to_json(r.best_params);
    j["final_params"] = params_to_json(r.final_params);
  }
  if (options.include_timings) {
    j["timings"] = {{"spectrum_seconds", r.timings.spectrum_seconds},
                    {"init_seconds", r.timings.init_seconds},
                    {"steps_seconds", r.timings.steps_seconds},
                    {"validation_seconds", r.timings.validation_seconds},
                    {"elapsed_seconds", r.elapsed_seconds}};
  }
  return j.dump(options.indent) + "\n";
}

std::string params_json(const ProbeParams& params) { return params_to_json(params).dump() + "\n"; }

ProbeParams parse_params_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const auto& w = j.at("w");
    const auto& alpha = j.at("alpha");
    const auto k = static_cast<Index>(w.size());
    if (k == 0 || static_cast<Index>(alpha.size()) != k) throw FormatError("params: w/alpha row mismatch");
    const auto d = static_cast<Index>(w.at(0).size());
    ProbeParams p{Matrix(k, d), Vector(k)};
    for (Index i = 0; i < k; ++i) {
      const auto& row = w.at(static_cast<std::size_t>(i));
      if (static_cast<Index>(row.size()) != d) throw FormatError("params: ragged w");
      for (Index c = 0; c < d; ++c) p.w(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
      p.alpha(i) = alpha.at(static_cast<std::size_t>(i)).get<double>();
    }
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("params: ") + e.what());
  }
}

void write_params(const std::filesystem::path& path, const ProbeParams& params) {
  write_text(path, params_json(params));
}

ProbeParams read_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_params_json(ss.str());
}

std::string predictions_json(const LabelVector& predictions, double accuracy) {
  json j;
  j["predictions"] = std::vector<std::uint32_t>(predictions.values().begin(), predictions.values().end());
  j["classes"] = predictions.classes();
  if (accuracy >= 0.0) j["accuracy"] = accuracy;
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

}  // namespace lpbmm
