#include "lpbmm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "lpbmm/loss_grad.hpp"

namespace lpbmm {

namespace {

using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

void check_matvec_spans(const FeatureMatrix& features, std::size_t x, std::size_t out,
                        std::size_t scratch) {
  const auto n = static_cast<std::size_t>(features.rows());
  const auto d = static_cast<std::size_t>(features.dim());
  if (x != d || out != d || scratch < n) throw DimensionError("gram_matvec: span size mismatch");
}

// Shared power-iteration loop; `apply` writes A x into its second argument.
GramSpectrum power_iterate(Index dim, const Vector& start, double tol, std::size_t max_iter,
                           const std::function<void(const Vector&, Vector&)>& apply) {
  if (tol <= 0.0) throw InputError("power iteration: tol must be positive");
  Vector x = start;
  const double start_norm = x.norm();
  if (start_norm < 1e-12) {
    x = Vector::Zero(dim);
    x(0) = 1.0;
  } else {
    x /= start_norm;
  }
  Vector y(dim);
  GramSpectrum out;
  double previous = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    apply(x, y);
    const double rayleigh = x.dot(y);
    out.lambda_max = rayleigh;
    out.iterations_used = it;
    const double ynorm = y.norm();
    if (ynorm == 0.0) {
      // x lies in the null space; the matrix is zero along every direction tried.
      out.lambda_max = 0.0;
      out.converged = true;
      return out;
    }
    if (it > 1 && std::abs(rayleigh - previous) <= tol * std::abs(rayleigh) &&
        (y - rayleigh * x).norm() <= std::sqrt(tol) * std::abs(rayleigh)) {
      out.converged = true;
      return out;
    }
    previous = rayleigh;
    x = y / ynorm;
  }
  return out;
}

// Row combination with fixed pseudo-random coefficients in [0.5, 1.5).
Vector row_mix_start(const FeatureMatrix& features, const Vector& weights) {
  Vector coeff(features.rows());
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  for (Index i = 0; i < coeff.size(); ++i) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    coeff(i) = 0.5 + static_cast<double>(z >> 11) * 0x1.0p-53;
  }
  return features.data().transpose() * coeff.cwiseProduct(weights);
}

}  // namespace

void gram_matvec(const FeatureMatrix& features, std::span<const double> x, std::span<double> out,
                 std::span<double> scratch) {
  check_matvec_spans(features, x.size(), out.size(), scratch.size());
  const ConstVecMap xv(x.data(), static_cast<Index>(x.size()));
  VecMap sv(scratch.data(), features.rows());
  VecMap ov(out.data(), static_cast<Index>(out.size()));
  sv.noalias() = features.data() * xv;
  ov.noalias() = features.data().transpose() * sv;
}

void weighted_gram_matvec(const FeatureMatrix& features, std::span<const double> weights,
                          std::span<const double> x, std::span<double> out,
                          std::span<double> scratch) {
  check_matvec_spans(features, x.size(), out.size(), scratch.size());
  if (weights.size() != static_cast<std::size_t>(features.rows())) {
    throw DimensionError("weighted_gram_matvec: weight count mismatch");
  }
  const ConstVecMap xv(x.data(), static_cast<Index>(x.size()));
  const ConstVecMap wv(weights.data(), features.rows());
  VecMap sv(scratch.data(), features.rows());
  VecMap ov(out.data(), static_cast<Index>(out.size()));
  sv.noalias() = features.data() * xv;
  sv.array() *= wv.array();
  ov.noalias() = features.data().transpose() * sv;
}

GramSpectrum power_iteration_gram(const FeatureMatrix& features, double tol,
                                  std::size_t max_iter) {
  Vector scratch(features.rows());
  const Vector start = row_mix_start(features, Vector::Ones(features.rows()));
  return power_iterate(features.dim(), start, tol, max_iter, [&](const Vector& x, Vector& y) {
    gram_matvec(features, {x.data(), static_cast<std::size_t>(x.size())},
                {y.data(), static_cast<std::size_t>(y.size())},
                {scratch.data(), static_cast<std::size_t>(scratch.size())});
  });
}

GramSpectrum power_iteration_weighted_gram(const FeatureMatrix& features,
                                           std::span<const double> weights, double tol,
                                           std::size_t max_iter) {
  if (weights.size() != static_cast<std::size_t>(features.rows())) {
    throw DimensionError("weighted power iteration: weight count mismatch");
  }
  const ConstVecMap wv(weights.data(), features.rows());
  const Vector start = row_mix_start(features, wv);
  Vector scratch(features.rows());
  return power_iterate(features.dim(), start, tol, max_iter, [&](const Vector& x, Vector& y) {
    weighted_gram_matvec(features, weights, {x.data(), static_cast<std::size_t>(x.size())},
                         {y.data(), static_cast<std::size_t>(y.size())},
                         {scratch.data(), static_cast<std::size_t>(scratch.size())});
  });
}

std::vector<double> symmetric_eigenvalues(Matrix a, double tol, std::size_t max_sweeps) {
  if (a.rows() != a.cols()) throw DimensionError("symmetric_eigenvalues: matrix not square");
  const Index n = a.rows();
  const double scale = std::max(a.norm(), 1e-300);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= tol * scale) break;

    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation zeroing a(p,q) (Golub & Van Loan, sym.schur2).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

std::vector<double> dense_gram_eigs(const FeatureMatrix& features) {
  if (features.dim() > kDenseOracleMaxDim) {
    throw OracleScopeError("dense_gram_eigs: D=" + std::to_string(features.dim()) +
                           " exceeds oracle limit " + std::to_string(kDenseOracleMaxDim));
  }
  Matrix gram(features.dim(), features.dim());
  gram.noalias() = features.data().transpose() * features.data();
  return symmetric_eigenvalues(std::move(gram));
}

EigenRange gershgorin_check(std::span<const double> p) {
  if (p.empty()) throw InputError("gershgorin_check: empty vector");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < -1e-9) throw InputError("gershgorin_check: entry off simplex");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InputError("gershgorin_check: entries do not sum to 1");
  const auto k = static_cast<Index>(p.size());
  const Eigen::Map<const Eigen::VectorXd> pv(p.data(), k);
  Matrix m = -pv * pv.transpose();
  m.diagonal() += pv;
  const auto eig = symmetric_eigenvalues(std::move(m));
  return {eig.back(), eig.front()};
}

Vector hessian_alpha_diag(const Matrix& similarity, const Matrix& p) {
  if (similarity.rows() != p.rows() || similarity.cols() != p.cols()) {
    throw DimensionError("hessian_alpha_diag: shape mismatch");
  }
  const Matrix weight = (p.array() - p.array().square()).matrix();
  return weight.cwiseProduct(similarity.cwiseAbs2()).colwise().sum().transpose() /
         static_cast<double>(p.rows());
}

Vector hessian_alpha_diag(const SupportSet& support, const TextBank& text,
                          const SoftmaxCache& cache) {
  return hessian_alpha_diag(similarity(support.features(), text), cache.p);
}

Vector class_curvature_bound(const Matrix& p) {
  return (p.array() - p.array().square()).matrix().colwise().sum().transpose() /
         static_cast<double>(p.rows());
}

Vector class_curvature_power(const FeatureMatrix& features, const Matrix& p, double tol,
                             std::size_t max_iter) {
  if (p.rows() != features.rows()) throw DimensionError("class_curvature_power: row mismatch");
  Vector out(p.cols());
  std::vector<double> weights(static_cast<std::size_t>(p.rows()));
  for (Index k = 0; k < p.cols(); ++k) {
    for (Index i = 0; i < p.rows(); ++i) {
      weights[static_cast<std::size_t>(i)] = p(i, k) - p(i, k) * p(i, k);
    }
    const auto spectrum = power_iteration_weighted_gram(features, weights, tol, max_iter);
    // Fall back to the closed-form bound when the iteration has not settled.
    double bound = 0.0;
    for (double w : weights) bound += w;
    out(k) = (spectrum.converged ? spectrum.lambda_max : bound) / static_cast<double>(p.rows());
  }
  return out;
}

}  // namespace lpbmm
