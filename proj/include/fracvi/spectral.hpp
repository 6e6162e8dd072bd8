#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "fracvi/grid.hpp"
#include "fracvi/linalg.hpp"

namespace fracvi {

/// Second-order Dirichlet Laplacian stencil on a mask (3-point in 1D,
/// 5-point in 2D). Neighbors outside the mask carry value zero.
inline Matrix laplacian_stencil(const DomainMask& mask) {
  const BoxGrid& g = mask.grid();
  const int m = mask.size();
  const double ihx2 = 1.0 / (g.spacing(0) * g.spacing(0));
  const double ihy2 = g.dim() == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0;
  Matrix a(m, m);
  for (int i = 0; i < m; ++i) {
    const int node = mask.indices()[i];
    a(i, i) = 2.0 * ihx2 + (g.dim() == 2 ? 2.0 * ihy2 : 0.0);
    const int ix = g.axis_index(node, 0);
    if (ix > 0) {
      const int loc = mask.local_index(node - 1);
      if (loc >= 0) a(i, loc) = -ihx2;
    }
    if (ix + 1 < g.nodes(0)) {
      const int loc = mask.local_index(node + 1);
      if (loc >= 0) a(i, loc) = -ihx2;
    }
    if (g.dim() == 2) {
      const int iy = g.axis_index(node, 1);
      if (iy > 0) {
        const int loc = mask.local_index(node - g.nodes(0));
        if (loc >= 0) a(i, loc) = -ihy2;
      }
      if (iy + 1 < g.nodes(1)) {
        const int loc = mask.local_index(node + g.nodes(0));
        if (loc >= 0) a(i, loc) = -ihy2;
      }
    }
  }
  return a;
}

/// Eigenpairs of the discrete Dirichlet Laplacian on a mask. Eigenvalues
/// ascending; eigenvectors orthonormal in the cell-weighted inner product
/// <u,v> = w * sum u_i v_i with w the cell volume.
struct SpectralDecomposition {
  DomainMask mask;
  Vector eigenvalues;  // ascending, all > 0
  Matrix eigenvectors; // column j: phi_j on the mask, w-orthonormal

  int size() const { return mask.size(); }
  double weight() const { return mask.weight(); }

  /// w-weighted coefficient <v, phi_j>.
  double coefficient(const Vector& v, int j) const {
    double acc = 0.0;
    for (int i = 0; i < size(); ++i) acc += v[i] * eigenvectors(i, j);
    return acc * weight();
  }

  Vector mode(int j) const {
    Vector phi(size());
    for (int i = 0; i < size(); ++i) phi[i] = eigenvectors(i, j);
    return phi;
  }
};

namespace detail {

/// Closed-form discrete sine eigenpairs for a full tensor box.
inline SpectralDecomposition sine_eigenpairs(const DomainMask& mask) {
  const BoxGrid& g = mask.grid();
  const int m = mask.size();
  SpectralDecomposition dec{mask, Vector(m), Matrix(m, m)};

  auto axis_eigenvalue = [&](int axis, int k) {
    const double h = g.spacing(axis), L = g.length(axis);
    const double sn = std::sin(0.5 * (k + 1) * std::numbers::pi * h / L);
    return 4.0 / (h * h) * sn * sn;
  };
  auto axis_mode = [&](int axis, int k, int i) {
    const double L = g.length(axis);
    const double x = g.coord(axis, i) - g.lo(axis);
    return std::sqrt(2.0 / L) * std::sin((k + 1) * std::numbers::pi * x / L);
  };

  if (g.dim() == 1) {
    for (int k = 0; k < m; ++k) {
      dec.eigenvalues[k] = axis_eigenvalue(0, k);
      for (int i = 0; i < m; ++i) dec.eigenvectors(i, k) = axis_mode(0, k, i);
    }
    return dec;
  }

  const int nx = g.nodes(0), ny = g.nodes(1);
  std::vector<std::array<int, 2>> modes;
  modes.reserve(static_cast<std::size_t>(m));
  for (int ky = 0; ky < ny; ++ky)
    for (int kx = 0; kx < nx; ++kx) modes.push_back({kx, ky});
  std::stable_sort(modes.begin(), modes.end(), [&](const auto& a, const auto& b) {
    return axis_eigenvalue(0, a[0]) + axis_eigenvalue(1, a[1]) <
           axis_eigenvalue(0, b[0]) + axis_eigenvalue(1, b[1]);
  });
  for (int j = 0; j < m; ++j) {
    const auto [kx, ky] = modes[static_cast<std::size_t>(j)];
    dec.eigenvalues[j] = axis_eigenvalue(0, kx) + axis_eigenvalue(1, ky);
    for (int i = 0; i < m; ++i) {
      const int node = mask.indices()[i];
      dec.eigenvectors(i, j) =
          axis_mode(0, kx, g.axis_index(node, 0)) * axis_mode(1, ky, g.axis_index(node, 1));
    }
  }
  return dec;
}

}  // namespace detail

constexpr int kDenseEigensolveCap = 2000;

/// Eigendecomposition of the discrete Dirichlet Laplacian on a mask.
/// Full tensor boxes use the closed-form sine basis; general masks go
/// through the dense cyclic-Jacobi solver.
inline SpectralDecomposition eigendecompose(const DomainMask& mask) {
  if (mask.is_full_box()) return detail::sine_eigenpairs(mask);
  if (mask.size() > kDenseEigensolveCap)
    throw std::invalid_argument("eigendecompose: mask too large for the dense eigensolver");
  EigenResult er = jacobi_eigensolve(laplacian_stencil(mask));
  SpectralDecomposition dec{mask, std::move(er.values), Matrix(mask.size(), mask.size())};
  const double inv_sqrt_w = 1.0 / std::sqrt(mask.weight());
  for (std::size_t i = 0; i < er.vectors.rows(); ++i)
    for (std::size_t j = 0; j < er.vectors.cols(); ++j)
      dec.eigenvectors(i, j) = er.vectors(i, j) * inv_sqrt_w;
  return dec;
}

constexpr int kMaterializeCap = 512;

/// The spectral fractional Laplacian on a mask: v -> sum_j lambda_j^s <v,phi_j> phi_j.
/// Order s in (0,1]; s = 1 reduces to the plain stencil. Immutable after
/// construction; apply/solve are pure with a fixed mode summation order.
class NavierOperator {
 public:
  NavierOperator(std::shared_ptr<const SpectralDecomposition> dec, double s,
                 bool materialize = true)
      : dec_(std::move(dec)), s_(s) {
    if (!(s_ > 0.0 && s_ <= 1.0)) throw std::invalid_argument("NavierOperator: s must be in (0,1]");
    if (materialize && size() <= kMaterializeCap) materialize_matrix();
  }

  NavierOperator(const DomainMask& mask, double s, bool materialize = true)
      : NavierOperator(std::make_shared<SpectralDecomposition>(eigendecompose(mask)), s,
                       materialize) {}

  const DomainMask& mask() const { return dec_->mask; }
  const SpectralDecomposition& decomposition() const { return *dec_; }
  double order() const { return s_; }
  int size() const { return dec_->size(); }
  double weight() const { return dec_->weight(); }

  Vector apply(const Vector& v) const { return apply_power(v, s_); }

  /// Fractional "square root" L^{s/2}; ||half_apply(v)||^2_w == quadratic_form(v).
  Vector half_apply(const Vector& v) const { return apply_power(v, 0.5 * s_); }

  /// Energy <L^s v, v>_w = sum_j lambda_j^s <v,phi_j>^2.
  double quadratic_form(const Vector& v) const {
    check_size(v);
    double acc = 0.0;
    for (int j = 0; j < size(); ++j) {
      const double c = dec_->coefficient(v, j);
      acc += std::pow(dec_->eigenvalues[j], s_) * c * c;
    }
    return acc;
  }

  /// L^{-s} f; the unique mask function with apply(solve(f)) == f.
  Vector solve(const Vector& f) const { return apply_power(f, -s_); }

  /// Dense matrix of L^s in nodal coordinates (Phi Lambda^s Phi^T w).
  const Matrix& matrix() const {
    if (!matrix_) {
      if (size() > kMaterializeCap)
        throw std::runtime_error("NavierOperator::matrix: mask too large to materialize");
      const_cast<NavierOperator*>(this)->materialize_matrix();
    }
    return *matrix_;
  }

  bool has_matrix() const { return matrix_.has_value(); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kind"] = "navier";
    j["mask_ref"] = mask_to_json(mask());
    j["s"] = s_;
    j["eigenvalues"] = dec_->eigenvalues;
    return j;
  }

  /// CSV dump of the materialized matrix (debugging aid).
  void write_matrix_csv(std::ostream& os) const {
    const Matrix& a = matrix();
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) {
        if (j) os << ',';
        os << a(i, j);
      }
      os << '\n';
    }
  }

 private:
  void check_size(const Vector& v) const {
    if (v.size() != static_cast<std::size_t>(size()))
      throw std::invalid_argument("NavierOperator: vector does not live on the operator mask");
  }

  Vector apply_power(const Vector& v, double power) const {
    check_size(v);
    Vector out(v.size(), 0.0);
    for (int j = 0; j < size(); ++j) {
      const double c = std::pow(dec_->eigenvalues[j], power) * dec_->coefficient(v, j);
      for (int i = 0; i < size(); ++i) out[i] += c * dec_->eigenvectors(i, j);
    }
    return out;
  }

  void materialize_matrix() {
    const int m = size();
    const double w = weight();
    Matrix a(m, m);
    for (int j = 0; j < m; ++j) {
      const double ls = std::pow(dec_->eigenvalues[j], s_);
      for (int i = 0; i < m; ++i) {
        const double pij = dec_->eigenvectors(i, j);
        for (int k = 0; k < m; ++k) a(i, k) += ls * pij * dec_->eigenvectors(k, j) * w;
      }
    }
    matrix_ = std::move(a);
  }

  std::shared_ptr<const SpectralDecomposition> dec_;
  double s_;
  std::optional<Matrix> matrix_;
};

}  // namespace fracvi
