#include "lpbmm/init.hpp"

#include <cmath>
#include <random>
#include <string>

#include "lpbmm/loss_grad.hpp"

namespace lpbmm {

namespace {

// Row k = Σ_{i: y_i = k} f_i.
Matrix class_sums(const SupportSet& support) {
  support.require_all_classes();
  const auto& f = support.features().data();
  Matrix sums = Matrix::Zero(support.classes(), f.cols());
  for (Index i = 0; i < f.rows(); ++i) sums.row(support.labels()[static_cast<std::size_t>(i)]) += f.row(i);
  return sums;
}

Vector class_similarity_sums(const SupportSet& support, const Matrix& sim) {
  support.require_all_classes();
  Vector sums = Vector::Zero(support.classes());
  for (Index i = 0; i < sim.rows(); ++i) {
    const auto y = support.labels()[static_cast<std::size_t>(i)];
    sums(y) += sim(i, y);
  }
  return sums;
}

double true_class_logit_mean(const Matrix& l, const LabelVector& labels) {
  double total = 0.0;
  for (Index i = 0; i < l.rows(); ++i) total += l(i, labels[static_cast<std::size_t>(i)]);
  return total / static_cast<double>(l.rows());
}

double log_partition_mean(const Matrix& l) {
  double total = 0.0;
  for (Index i = 0; i < l.rows(); ++i) {
    const double m = l.row(i).maxCoeff();
    total += m + std::log((l.row(i).array() - m).exp().sum());
  }
  return total / static_cast<double>(l.rows());
}

}  // namespace

Matrix init_w_hard(const SupportSet& support) { return class_sums(support); }

Vector init_alpha_hard(const SupportSet& support, const TextBank& text) {
  const Matrix sim = similarity(support.features(), text);
  return kTextScaleNumerator / static_cast<double>(support.shots()) *
         class_similarity_sums(support, sim);
}

Matrix soft_mean_w(const SupportSet& support, const SoftmaxCache& cache) {
  const Vector mass = cache.p.colwise().sum().transpose();
  for (Index k = 0; k < mass.size(); ++k) {
    if (mass(k) < 1e-12) {
      throw DegenerateWeightError("soft_mean_w: class " + std::to_string(k) +
                                  " has vanishing probability mass");
    }
  }
  Matrix out(cache.p.cols(), support.features().dim());
  out.noalias() = cache.p.transpose() * support.features().data();
  return mass.cwiseInverse().asDiagonal() * out;
}

Vector soft_mean_alpha(const SupportSet& support, const TextBank& text, const SoftmaxCache& cache) {
  const Matrix sim = similarity(support.features(), text);
  const Vector mass = cache.p.colwise().sum().transpose();
  for (Index k = 0; k < mass.size(); ++k) {
    if (mass(k) < 1e-12) {
      throw DegenerateWeightError("soft_mean_alpha: class " + std::to_string(k) +
                                  " has vanishing probability mass");
    }
  }
  return cache.p.cwiseProduct(sim).colwise().sum().transpose().cwiseQuotient(mass);
}

Vector hard_mean_alpha(const SupportSet& support, const TextBank& text) {
  const Matrix sim = similarity(support.features(), text);
  const auto counts = support.labels().class_counts();
  Vector sums = class_similarity_sums(support, sim);
  for (Index k = 0; k < sums.size(); ++k) sums(k) /= static_cast<double>(counts[static_cast<std::size_t>(k)]);
  return sums;
}

double g1_value(const SupportSet& support, const TextBank& text, const ProbeParams& params,
                double lambda) {
  const Matrix l = logits(support.features(), text, params);
  return -true_class_logit_mean(l, support.labels()) + 0.5 * lambda * params.w.squaredNorm();
}

double g2_value(const SupportSet& support, const TextBank& text, const ProbeParams& params,
                double lambda) {
  const Matrix l = logits(support.features(), text, params);
  return log_partition_mean(l) - 0.5 * lambda * params.w.squaredNorm();
}

Matrix g1_grad_w(const SupportSet& support, const ProbeParams& params, double lambda) {
  const auto& f = support.features().data();
  Matrix g = lambda * params.w;
  const double inv_n = 1.0 / static_cast<double>(f.rows());
  for (Index i = 0; i < f.rows(); ++i) g.row(support.labels()[static_cast<std::size_t>(i)]) -= inv_n * f.row(i);
  return g;
}

Matrix g1_minimizer_w(const SupportSet& support, double lambda) {
  if (!(lambda > 0.0)) throw InputError("g1_minimizer_w: lambda must be positive");
  return class_sums(support) / (lambda * static_cast<double>(support.size()));
}

double h1_value(const SupportSet& support, const TextBank& text, const ProbeParams& params,
                double beta) {
  const Matrix l = logits(support.features(), text, params);
  return -true_class_logit_mean(l, support.labels()) + 0.5 * beta * params.alpha.squaredNorm();
}

double h2_value(const SupportSet& support, const TextBank& text, const ProbeParams& params,
                double beta) {
  const Matrix l = logits(support.features(), text, params);
  return log_partition_mean(l) - 0.5 * beta * params.alpha.squaredNorm();
}

Vector h1_grad_alpha(const SupportSet& support, const TextBank& text, const ProbeParams& params,
                     double beta) {
  const Matrix sim = similarity(support.features(), text);
  Vector g = beta * params.alpha;
  const double inv_n = 1.0 / static_cast<double>(sim.rows());
  for (Index i = 0; i < sim.rows(); ++i) {
    const auto y = support.labels()[static_cast<std::size_t>(i)];
    g(y) -= inv_n * sim(i, y);
  }
  return g;
}

Vector h1_minimizer_alpha(const SupportSet& support, const TextBank& text, double beta) {
  if (!(beta > 0.0)) throw InputError("h1_minimizer_alpha: beta must be positive");
  const Matrix sim = similarity(support.features(), text);
  return class_similarity_sums(support, sim) / (beta * static_cast<double>(support.size()));
}

ProbeParams initialize(const SupportSet& support, const TextBank& text, const InitConfig& config) {
  const Index k = text.classes();
  const Index d = text.dim();
  if (static_cast<Index>(support.labels().classes()) != k || support.features().dim() != d) {
    throw DimensionError("initialize: support and text bank disagree on K or D");
  }
  switch (config.mode) {
    case InitMode::zero:
      return ProbeParams::zeros(k, d);
    case InitMode::random: {
      std::mt19937_64 rng(config.seed);
      std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
      ProbeParams params = ProbeParams::zeros(k, d);
      for (Index r = 0; r < k; ++r)
        for (Index c = 0; c < d; ++c) params.w(r, c) = normal(rng);
      return params;
    }
    case InitMode::hard_mean: {
      if (!(config.lambda > 0.0) || !(config.beta > 0.0)) {
        throw InputError("initialize: lambda and beta must be positive");
      }
      ProbeParams params;
      params.w = g1_minimizer_w(support, config.lambda);
      params.alpha = h1_minimizer_alpha(support, text, config.beta);
      return params;
    }
  }
  throw InputError("initialize: unknown mode");
}

}  // namespace lpbmm
