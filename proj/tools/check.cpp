#include "check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lpbmm/loss_grad.hpp"
#include "lpbmm/spectral.hpp"

namespace lpbmm::tools {

namespace {

Matrix random_unit_rows(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = g(rng);
    m.row(i).normalize();
  }
  return m;
}

bool report(std::ostream& out, const char* name, bool ok, double worst) {
  out << (ok ? "PASS " : "FAIL ") << name << " (worst " << worst << ")\n";
  return ok;
}

bool gershgorin_draws(std::ostream& out, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kdist(2, 10);
  std::exponential_distribution<double> e;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> p(static_cast<std::size_t>(kdist(rng)));
    double sum = 0.0;
    for (auto& v : p) sum += (v = e(rng));
    for (auto& v : p) v /= sum;
    const EigenRange r = gershgorin_check(p);
    worst = std::max({worst, -r.min, r.max - 0.5});
  }
  return report(out, "softmax Jacobian eigenvalues in [0, 1/2]", worst <= 1e-10, worst);
}

bool gradient_checks(std::ostream& out, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kdist(2, 6), ddist(2, 12), sdist(1, 4);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Index k = kdist(rng), d = ddist(rng), n = k * sdist(rng);
    std::vector<std::uint32_t> y(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i % k);
    const SupportSet s(FeatureMatrix(random_unit_rows(rng, n, d)), LabelVector(y, static_cast<std::size_t>(k)));
    const TextBank text(random_unit_rows(rng, k, d));
    ProbeParams p{Matrix(k, d), Vector(k)};
    for (Index i = 0; i < p.w.size(); ++i) p.w.data()[i] = g(rng);
    for (Index i = 0; i < k; ++i) p.alpha(i) = g(rng);
    const Matrix gw = grad_w(s, text, p);
    const Vector ga = grad_alpha(s, text, p);
    const double h = 1e-5;
    auto fd = [&](double& x) {
      const double x0 = x;
      x = x0 + h;
      const double up = loss(s, text, p);
      x = x0 - h;
      const double dn = loss(s, text, p);
      x = x0;
      return (up - dn) / (2 * h);
    };
    double err = 0.0, scale = 1e-8;
    for (Index i = 0; i < p.w.size(); ++i) {
      err = std::max(err, std::abs(fd(p.w.data()[i]) - gw.data()[i]));
      scale = std::max(scale, std::abs(gw.data()[i]));
    }
    for (Index i = 0; i < k; ++i) {
      err = std::max(err, std::abs(fd(p.alpha(i)) - ga(i)));
      scale = std::max(scale, std::abs(ga(i)));
    }
    worst = std::max(worst, err / scale);
  }
  return report(out, "gradients vs central differences", worst < 1e-6, worst);
}

bool eigen_oracle(std::ostream& out, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ndist(5, 120), ddist(2, 48);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Index n = ndist(rng), d = ddist(rng);
    Matrix f = random_unit_rows(rng, n, d);
    // A shared direction separates the top eigenvalue from the rest.
    f.rowwise() += random_unit_rows(rng, 1, d).row(0);
    f.rowwise().normalize();
    const FeatureMatrix features(f);
    const double power = power_iteration_gram(features).lambda_max;
    const double dense = dense_gram_eigs(features).front();
    worst = std::max(worst, std::abs(power - dense) / dense);
  }
  return report(out, "power iteration vs dense eigensolver", worst < 1e-8, worst);
}

}  // namespace

bool run_checks(std::ostream& out, unsigned seed) {
  std::mt19937_64 rng(seed);
  bool ok = gershgorin_draws(out, rng);
  ok = gradient_checks(out, rng) && ok;
  ok = eigen_oracle(out, rng) && ok;
  return ok;
}

}  // namespace lpbmm::tools
