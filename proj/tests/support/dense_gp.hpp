#pragma once

// Plain dense GP arithmetic for cross-checking the library: explicit
// inverse and log-determinant by Gauss-Jordan elimination with partial
// pivoting, no Cholesky anywhere.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace testsupport {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

/// Inverse of a; logdet receives log|det a|.
inline Mat gauss_jordan_inverse(Mat a, double& logdet) {
  const std::size_t n = a.size();
  Mat inv(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  logdet = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    }
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    const double pivot = a[c][c];
    logdet += std::log(std::fabs(pivot));
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= pivot;
      inv[c][j] /= pivot;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

inline double se_kernel(const Vec& x, const Vec& z, double lengthscale, double signal) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - z[i]) * (x[i] - z[i]);
  return signal * std::exp(-d / (2.0 * lengthscale * lengthscale));
}

struct DenseGp {
  std::vector<Vec> x;
  Vec y_std;
  double mean = 0.0, scale = 1.0;
  double lengthscale = 1.0, signal = 1.0, noise = 1e-2;
  Mat k_inv;
  double logdet = 0.0;

  DenseGp(std::vector<Vec> inputs, const Vec& y, double l, double sf, double sn)
      : x(std::move(inputs)), lengthscale(l), signal(sf), noise(sn) {
    const std::size_t n = y.size();
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    if (n > 1) {
      double ss = 0.0;
      for (double v : y) ss += (v - mean) * (v - mean);
      if (ss > 0.0) scale = std::sqrt(ss / static_cast<double>(n - 1));
    }
    for (double v : y) y_std.push_back((v - mean) / scale);
    Mat k(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) k[i][j] = se_kernel(x[i], x[j], l, sf) + (i == j ? sn : 0.0);
    }
    k_inv = gauss_jordan_inverse(k, logdet);
  }

  double log_marginal_likelihood() const {
    const std::size_t n = y_std.size();
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) quad += y_std[i] * k_inv[i][j] * y_std[j];
    }
    return -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
  }

  /// Mean and variance in original units.
  std::pair<double, double> predict(const Vec& q) const {
    const std::size_t n = y_std.size();
    Vec ks(n);
    for (std::size_t i = 0; i < n; ++i) ks[i] = se_kernel(q, x[i], lengthscale, signal);
    double mu = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += k_inv[i][j] * y_std[j];
      mu += ks[i] * row;
      for (std::size_t j = 0; j < n; ++j) quad += ks[i] * k_inv[i][j] * ks[j];
    }
    return {mu * scale + mean, std::max(signal - quad, 0.0) * scale * scale};
  }
};

}  // namespace testsupport
