#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracvi {

using Vector = std::vector<double>;

/// Dense row-major matrix. Sized for desk-scale problems (m <~ 2000).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  double* row(std::size_t i) { return data_.data() + i * cols_; }

  Vector apply(const Vector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("Matrix::apply: dimension mismatch");
    Vector out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* r = row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) acc += r[j] * v[j];
      out[i] = acc;
    }
    return out;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

inline double dot(const Vector& a, const Vector& b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double max_abs(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double min_elem(const Vector& v) {
  double m = v.empty() ? 0.0 : v[0];
  for (double x : v) m = std::min(m, x);
  return m;
}

inline double max_elem(const Vector& v) {
  double m = v.empty() ? 0.0 : v[0];
  for (double x : v) m = std::max(m, x);
  return m;
}

struct EigenResult {
  Vector values;   // ascending
  Matrix vectors;  // column j is the eigenvector for values[j], Euclidean-orthonormal
};

/// Cyclic Jacobi eigensolver for symmetric matrices. Eigenvalues ascending,
/// eigenvectors Euclidean-orthonormal columns.
inline EigenResult jacobi_eigensolve(Matrix a, int max_sweeps = 100,
                                     double tol = 1e-14) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("jacobi_eigensolve: matrix not square");
  Matrix v = Matrix::identity(n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
  if (scale == 0.0) scale = 1.0;

  int sweep = 0;
  bool cleanup_done = false;  // one extra sweep after the threshold, for headroom
  for (; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= tol * scale * static_cast<double>(n)) {
      if (cleanup_done) break;
      cleanup_done = true;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps && off_norm() > 1e-8 * scale * static_cast<double>(n)) {
    throw std::runtime_error("jacobi_eigensolve: no convergence after " +
                             std::to_string(max_sweeps) +
                             " sweeps, off-diagonal residual " + std::to_string(off_norm()));
  }

  // sort ascending
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  EigenResult res;
  res.values.resize(n);
  res.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    res.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) res.vectors(i, j) = v(i, order[j]);
  }
  return res;
}

/// In-place Cholesky factorization solve for SPD systems.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const Matrix& a) : l_(a), n_(a.rows()) {
    if (a.rows() != a.cols()) throw std::invalid_argument("Cholesky: matrix not square");
    for (std::size_t j = 0; j < n_; ++j) {
      double d = l_(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (d <= 0.0) throw std::runtime_error("Cholesky: matrix not positive definite");
      const double ljj = std::sqrt(d);
      l_(j, j) = ljj;
      for (std::size_t i = j + 1; i < n_; ++i) {
        double s = l_(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
        l_(i, j) = s / ljj;
      }
    }
  }

  Vector solve(Vector b) const {
    if (b.size() != n_) throw std::invalid_argument("Cholesky::solve: dimension mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * b[k];
      b[i] = s / l_(i, i);
    }
    for (std::size_t ii = n_; ii-- > 0;) {
      double s = b[ii];
      for (std::size_t k = ii + 1; k < n_; ++k) s -= l_(k, ii) * b[k];
      b[ii] = s / l_(ii, ii);
    }
    return b;
  }

 private:
  Matrix l_;
  std::size_t n_;
};

/// Thomas algorithm for tridiagonal systems. Diagonals given as
/// (lower, diag, upper); lower[0] and upper[n-1] are ignored.
inline Vector solve_tridiagonal(const Vector& lower, const Vector& diag,
                                const Vector& upper, Vector rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  Vector c(n, 0.0);
  double piv = diag[0];
  if (piv == 0.0) throw std::runtime_error("solve_tridiagonal: singular pivot");
  c[0] = upper.empty() ? 0.0 : upper[0] / piv;
  rhs[0] /= piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - lower[i] * c[i - 1];
    if (piv == 0.0) throw std::runtime_error("solve_tridiagonal: singular pivot");
    c[i] = (i + 1 < n ? upper[i] : 0.0) / piv;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / piv;
  }
  for (std::size_t ii = n - 1; ii-- > 0;) rhs[ii] -= c[ii] * rhs[ii + 1];
  return rhs;
}

}  // namespace fracvi
