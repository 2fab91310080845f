#include "lpbmm/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lpbmm/loss_grad.hpp"

namespace lpbmm {

namespace {

void require_tau(double tau, double min, const char* name) {
  if (!(tau >= min) || !std::isfinite(tau)) {
    throw InputError(std::string(name) + " must be >= " + std::to_string(min));
  }
}

}  // namespace

double gamma_w_from_spectrum(const GramSpectrum& spectrum, Index samples, double tau1) {
  require_tau(tau1, 1.0, "tau1");
  if (samples < 1) throw InputError("gamma_w: empty feature set");
  const double n = static_cast<double>(samples);
  const double lambda = spectrum.converged ? spectrum.lambda_max : n;
  if (!(lambda > 0.0)) throw InputError("gamma_w: Gram matrix has no positive eigenvalue");
  return tau1 / (4.0 * n) * lambda;
}

double gamma_w(const FeatureMatrix& features, double tau1) {
  return gamma_w_from_spectrum(power_iteration_gram(features), features.rows(), tau1);
}

double gamma_alpha_from_similarity(const Matrix& similarity, double tau2) {
  require_tau(tau2, 1.0, "tau2");
  if (similarity.rows() < 1) throw InputError("gamma_alpha: empty feature set");
  const double max_sum = similarity.cwiseAbs2().colwise().sum().maxCoeff();
  if (max_sum <= 1e-24) {
    throw DegenerateTextError("gamma_alpha: every text embedding is orthogonal to every feature");
  }
  return tau2 / (4.0 * static_cast<double>(similarity.rows())) * max_sum;
}

double gamma_alpha(const FeatureMatrix& features, const TextBank& text, double tau2) {
  return gamma_alpha_from_similarity(similarity(features, text), tau2);
}

double gamma_global(double gw, double ga, double tau) {
  if (!(gw > 0.0) || !(ga > 0.0) || !(tau > 0.0)) {
    throw InputError("gamma_global: inputs must be positive");
  }
  return tau * std::max(gw, ga);
}

StepSizes compute_step_sizes(const FeatureMatrix& features, const Matrix& similarity,
                             const Taus& taus) {
  const GramSpectrum spectrum = power_iteration_gram(features);
  StepSizes out;
  out.tau1 = taus.tau1;
  out.tau2 = taus.tau2;
  out.tau = taus.tau;
  out.lambda_max = spectrum.converged ? spectrum.lambda_max : static_cast<double>(features.rows());
  out.spectrum_converged = spectrum.converged;
  out.gamma_w = gamma_w_from_spectrum(spectrum, features.rows(), taus.tau1);
  out.gamma_alpha = gamma_alpha_from_similarity(similarity, taus.tau2);
  out.gamma_global = gamma_global(out.gamma_w, out.gamma_alpha, taus.tau);
  return out;
}

}  // namespace lpbmm
