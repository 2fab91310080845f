#pragma once

// Independent reference implementations used by the tests. Everything here is
// written with plain loops over std::vector so that it shares no code path with
// the library's Eigen kernels.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lpbmm/data_model.hpp"

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const lpbmm::Matrix& m) {
  Rows r(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (lpbmm::Index i = 0; i < m.rows(); ++i)
    for (lpbmm::Index j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Problem {
  Rows f;                        // N×D
  Rows t;                        // K×D
  std::vector<std::uint32_t> y;  // N
};

inline Problem from(const lpbmm::SupportSet& s, const lpbmm::TextBank& text) {
  return {to_rows(s.features().data()), to_rows(text.data()),
          std::vector<std::uint32_t>(s.labels().values().begin(), s.labels().values().end())};
}

// l_ik = Σ_d f_id (w_kd + α_k t_kd)
inline Rows logits(const Problem& p, const Rows& w, const std::vector<double>& alpha) {
  const std::size_t n = p.f.size(), k = w.size(), d = p.f[0].size();
  Rows l(n, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t j = 0; j < d; ++j) l[i][c] += p.f[i][j] * (w[c][j] + alpha[c] * p.t[c][j]);
  return l;
}

inline Rows softmax(const Rows& l) {
  Rows p = l;
  for (auto& row : p) {
    double m = row[0];
    for (double v : row) m = std::max(m, v);
    double z = 0.0;
    for (double& v : row) z += (v = std::exp(v - m));
    for (double& v : row) v /= z;
  }
  return p;
}

inline double loss(const Problem& p, const Rows& w, const std::vector<double>& alpha) {
  const Rows l = logits(p, w, alpha);
  double total = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    double m = l[i][0];
    for (double v : l[i]) m = std::max(m, v);
    double z = 0.0;
    for (double v : l[i]) z += std::exp(v - m);
    total += m + std::log(z) - l[i][p.y[i]];
  }
  return total / static_cast<double>(l.size());
}

// (1/N) Σ_i (p_ik - y_ik) f_i and (1/N) Σ_i (p_ik - y_ik) f_i·t_k
inline void gradients(const Problem& p, const Rows& w, const std::vector<double>& alpha, Rows& gw,
                      std::vector<double>& ga) {
  const std::size_t n = p.f.size(), k = w.size(), d = p.f[0].size();
  const Rows pr = softmax(logits(p, w, alpha));
  gw.assign(k, std::vector<double>(d, 0.0));
  ga.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      const double r = (pr[i][c] - (p.y[i] == c ? 1.0 : 0.0)) / static_cast<double>(n);
      for (std::size_t j = 0; j < d; ++j) gw[c][j] += r * p.f[i][j];
      ga[c] += r * dot(p.f[i], p.t[c]);
    }
  }
}

// Plain multinomial logistic regression (no text term, no bias) trained by
// gradient descent with a fixed step, written from scratch.
inline Rows logistic_regression_gd(const Rows& f, const std::vector<std::uint32_t>& y, std::size_t k,
                                   double step, std::size_t iterations, double grad_tol = 0.0,
                                   double* final_grad_norm = nullptr) {
  const std::size_t n = f.size(), d = f[0].size();
  Rows w(k, std::vector<double>(d, 0.0));
  for (std::size_t it = 0; it <= iterations; ++it) {
    Rows g(k, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> s(k);
      double m = -1e300;
      for (std::size_t c = 0; c < k; ++c) m = std::max(m, s[c] = dot(f[i], w[c]));
      double z = 0.0;
      for (double& v : s) z += (v = std::exp(v - m));
      for (std::size_t c = 0; c < k; ++c) {
        const double r = (s[c] / z - (y[i] == c ? 1.0 : 0.0)) / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) g[c][j] += r * f[i][j];
      }
    }
    double g2 = 0.0;
    for (const auto& row : g)
      for (double v : row) g2 += v * v;
    if (final_grad_norm) *final_grad_norm = std::sqrt(g2);
    if (it == iterations || std::sqrt(g2) < grad_tol) break;
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t j = 0; j < d; ++j) w[c][j] -= step * g[c][j];
  }
  return w;
}

inline std::vector<std::uint32_t> argmax_scores(const Rows& f, const Rows& w) {
  std::vector<std::uint32_t> out;
  for (const auto& row : f) {
    std::uint32_t best = 0;
    double bv = dot(row, w[0]);
    for (std::uint32_t c = 1; c < w.size(); ++c) {
      const double v = dot(row, w[c]);
      if (v > bv) {
        bv = v;
        best = c;
      }
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace oracle

namespace fixtures {

inline lpbmm::Matrix unit_rows(std::mt19937_64& rng, lpbmm::Index rows, lpbmm::Index cols) {
  std::normal_distribution<double> g;
  lpbmm::Matrix m(rows, cols);
  for (lpbmm::Index i = 0; i < rows; ++i) {
    for (lpbmm::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
    m.row(i).normalize();
  }
  return m;
}

// Balanced labels 0,1,..,K-1,0,1,.. so that every class is present when N >= K.
inline std::vector<std::uint32_t> cyclic_labels(lpbmm::Index n, lpbmm::Index k) {
  std::vector<std::uint32_t> y(static_cast<std::size_t>(n));
  for (lpbmm::Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i % k);
  return y;
}

inline lpbmm::ProbeParams random_params(std::mt19937_64& rng, lpbmm::Index k, lpbmm::Index d, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  lpbmm::ProbeParams p{lpbmm::Matrix(k, d), lpbmm::Vector(k)};
  for (lpbmm::Index i = 0; i < p.w.size(); ++i) p.w.data()[i] = g(rng);
  for (lpbmm::Index i = 0; i < k; ++i) p.alpha(i) = g(rng);
  return p;
}

struct Instance {
  lpbmm::SupportSet support;
  lpbmm::TextBank text;
};

inline Instance random_instance(std::mt19937_64& rng, lpbmm::Index n, lpbmm::Index k, lpbmm::Index d) {
  return {lpbmm::SupportSet(lpbmm::FeatureMatrix(unit_rows(rng, n, d)),
                            lpbmm::LabelVector(cyclic_labels(n, k), static_cast<std::size_t>(k))),
          lpbmm::TextBank(unit_rows(rng, k, d))};
}

}  // namespace fixtures
