#pragma once

// Dense symmetric linear algebra for Hessian analysis: finite-difference
// Hessians of a gradient function and a cyclic Jacobi eigensolver. Sized for
// the parameter counts of the small networks studied here (<= ~1000); no
// attempt at sparse or iterative methods.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lprobe/errors.hpp"

namespace lprobe {

struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;  // row-major, n*n

  Matrix() = default;
  explicit Matrix(std::size_t size) : n(size), a(size * size, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  static Matrix identity(std::size_t size) {
    Matrix m(size);
    for (std::size_t i = 0; i < size; ++i) m.at(i, i) = 1.0;
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
  }
};

using GradFn = std::function<std::vector<double>(std::span<const double>)>;

/// Central-difference Hessian of a gradient function, column by column, then
/// symmetrized with its transpose. Step per coordinate: h_base*max(1,|theta_j|).
inline Matrix hessian_fd(const GradFn& grad_fn, std::span<const double> theta,
                         double h_base = 1e-4) {
  if (h_base <= 0.0) throw UsageError("hessian_fd: step size must be positive");
  const std::size_t n = theta.size();
  Matrix h(n);
  std::vector<double> probe(theta.begin(), theta.end());
  for (std::size_t j = 0; j < n; ++j) {
    const double step = h_base * std::max(1.0, std::abs(theta[j]));
    probe[j] = theta[j] + step;
    const std::vector<double> gp = grad_fn(probe);
    probe[j] = theta[j] - step;
    const std::vector<double> gm = grad_fn(probe);
    probe[j] = theta[j];
    if (gp.size() != n || gm.size() != n)
      throw UsageError("hessian_fd: gradient length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      const double value = (gp[i] - gm[i]) / (2.0 * step);
      if (!std::isfinite(value))
        throw NumericalError("hessian_fd: non-finite entry at coordinate (" +
                             std::to_string(i) + ", " + std::to_string(j) + ")");
      h.at(i, j) = value;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sym = 0.5 * (h.at(i, j) + h.at(j, i));
      h.at(i, j) = sym;
      h.at(j, i) = sym;
    }
  return h;
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned in descending order; when eigenvectors is
/// non-null, its columns follow the same order and satisfy H = Q diag(l) Q^T.
inline std::vector<double> sym_eigenvalues(const Matrix& h,
                                           Matrix* eigenvectors = nullptr) {
  const std::size_t n = h.n;
  if (n == 0) return {};
  const double norm = h.frobenius();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(h.at(i, j) - h.at(j, i)) > 1e-10 * std::max(norm, 1.0))
        throw UsageError("sym_eigenvalues: matrix is not symmetric");

  Matrix a = h;
  Matrix q = Matrix::identity(n);
  const double tol = 1e-15 * std::max(norm, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t r = p + 1; r < n; ++r) off += a.at(p, r) * a.at(p, r);
    if (std::sqrt(2.0 * off) <= tol) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = a.at(p, r);
        if (std::abs(apr) <= tol / (2.0 * n)) continue;
        const double theta = (a.at(r, r) - a.at(p, p)) / (2.0 * apr);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) /
            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a.at(p, p), arr = a.at(r, r);
        a.at(p, p) = app - t * apr;
        a.at(r, r) = arr + t * apr;
        a.at(p, r) = 0.0;
        a.at(r, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k != p && k != r) {
            const double akp = a.at(k, p), akr = a.at(k, r);
            a.at(k, p) = akp - s * (akr + tau * akp);
            a.at(p, k) = a.at(k, p);
            a.at(k, r) = akr + s * (akp - tau * akr);
            a.at(r, k) = a.at(k, r);
          }
          const double qkp = q.at(k, p), qkr = q.at(k, r);
          q.at(k, p) = qkp - s * (qkr + tau * qkp);
          q.at(k, r) = qkr + s * (qkp - tau * qkr);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a.at(i, i) > a.at(j, j);
  });

  std::vector<double> eigenvalues(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a.at(order[i], order[i]);
  if (eigenvectors) {
    *eigenvectors = Matrix(n);
    for (std::size_t col = 0; col < n; ++col)
      for (std::size_t row = 0; row < n; ++row)
        eigenvectors->at(row, col) = q.at(row, order[col]);
  }
  return eigenvalues;
}

}  // namespace lprobe
