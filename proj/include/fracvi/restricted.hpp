#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fracvi/gamma.hpp"
#include "fracvi/grid.hpp"
#include "fracvi/linalg.hpp"
#include "fracvi/spectral.hpp"

namespace fracvi {

/// The fractional Laplacian of the ambient space acting on zero-extended
/// mask functions (exterior values pinned to 0). Two backends:
///   kernel-sum  (1D only): hypersingular lattice kernel with an exact
///               analytic tail, so off-diagonal entries are <= 0 exactly;
///   big-box     (1D/2D): the mode-series operator of a strictly larger
///               enclosing mask, applied to the zero-extension and
///               restricted back.
class RestrictedOperator {
 public:
  enum class Backend { KernelSum, BigBox };

  /// 1D kernel-sum backend. Offsets beyond K = 10 m are summed analytically
  /// through the integral bound of the kernel tail.
  static RestrictedOperator kernel_sum(const DomainMask& mask, double s) {
    if (mask.grid().dim() != 1)
      throw std::invalid_argument("RestrictedOperator::kernel_sum: 1D masks only");
    check_order(s);
    RestrictedOperator op(mask, s, Backend::KernelSum);
    op.build_kernel_matrix();
    return op;
  }

  static RestrictedOperator big_box(const DomainMask& mask, double s,
                                    std::shared_ptr<const NavierOperator> enclosing) {
    check_order(s);
    if (!enclosing) throw std::invalid_argument("RestrictedOperator::big_box: null enclosing operator");
    if (enclosing->order() != s)
      throw std::invalid_argument("RestrictedOperator::big_box: fractional order mismatch");
    if (!mask.is_subset_of(enclosing->mask()))
      throw std::invalid_argument("RestrictedOperator::big_box: mask not contained in the enclosing mask");
    if (mask == enclosing->mask())
      throw std::invalid_argument(
          "RestrictedOperator::big_box: enclosing mask equals the operator mask; the backend "
          "must differ from the mask's own mode-series operator");
    RestrictedOperator op(mask, s, Backend::BigBox);
    op.enclosing_ = std::move(enclosing);
    op.build_bigbox_matrix();
    return op;
  }

  static RestrictedOperator big_box(const DomainMask& mask, double s,
                                    const DomainMask& enclosing_mask) {
    return big_box(mask, s, std::make_shared<NavierOperator>(enclosing_mask, s));
  }

  const DomainMask& mask() const { return mask_; }
  double order() const { return s_; }
  Backend backend() const { return backend_; }
  int size() const { return mask_.size(); }
  double weight() const { return mask_.weight(); }
  const Matrix& matrix() const { return matrix_; }

  Vector apply(const Vector& v) const {
    if (v.size() != static_cast<std::size_t>(size()))
      throw std::invalid_argument("RestrictedOperator: vector does not live on the operator mask");
    return matrix_.apply(v);
  }

  /// Energy <L v, v> in the cell-weighted inner product.
  double quadratic_form(const Vector& v) const { return dot(apply(v), v) * weight(); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kind"] = "restricted";
    j["backend"] = backend_ == Backend::KernelSum ? "kernel-sum" : "big-box";
    j["mask_ref"] = mask_to_json(mask_);
    j["s"] = s_;
    if (backend_ == Backend::KernelSum) j["kernel_constant"] = kernel_constant(1, s_);
    if (enclosing_) j["enclosing_mask_ref"] = mask_to_json(enclosing_->mask());
    return j;
  }

 private:
  RestrictedOperator(DomainMask mask, double s, Backend b)
      : mask_(std::move(mask)), s_(s), backend_(b) {}

  static void check_order(double s) {
    if (!(s > 0.0 && s < 1.0))
      throw std::invalid_argument("RestrictedOperator: s must be in (0,1)");
  }

  void build_kernel_matrix() {
    const int m = size();
    if (m > kMaterializeCap)
      throw std::invalid_argument("RestrictedOperator: mask too large to materialize");
    const double h = mask_.grid().spacing(0);
    const double c = kernel_constant(1, s_) * std::pow(h, -2.0 * s_);
    const int K = 10 * m;
    // full lattice kernel sum; tail beyond K from int_K^inf t^{-1-2s} dt
    double full_sum = 2.0 * std::pow(static_cast<double>(K), -2.0 * s_) / (2.0 * s_);
    for (int k = K; k >= 1; --k) full_sum += 2.0 * std::pow(static_cast<double>(k), -1.0 - 2.0 * s_);
    matrix_ = Matrix(m, m);
    for (int i = 0; i < m; ++i) {
      matrix_(i, i) = c * full_sum;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const double k = std::abs(static_cast<double>(mask_.indices()[i] - mask_.indices()[j]));
        matrix_(i, j) = -c * std::pow(k, -1.0 - 2.0 * s_);
      }
    }
  }

  void build_bigbox_matrix() {
    const int m = size();
    if (m > kMaterializeCap)
      throw std::invalid_argument("RestrictedOperator: mask too large to materialize");
    const Matrix& big = enclosing_->matrix();
    matrix_ = Matrix(m, m);
    for (int i = 0; i < m; ++i) {
      const int gi = enclosing_->mask().local_index(mask_.indices()[i]);
      for (int j = 0; j < m; ++j) {
        const int gj = enclosing_->mask().local_index(mask_.indices()[j]);
        matrix_(i, j) = big(static_cast<std::size_t>(gi), static_cast<std::size_t>(gj));
      }
    }
  }

  DomainMask mask_;
  double s_;
  Backend backend_;
  std::shared_ptr<const NavierOperator> enclosing_;
  Matrix matrix_;
};

/// Worst-case and form-level margins of the mask operator dominating the
/// ambient-space operator on a nonnegative vector.
struct DominationReport {
  double min_pointwise_margin;  // min_i (L_mask v - L_ambient v)_i
  double form_margin;           // <L_mask v, v> - <L_ambient v, v>
  double tolerance;             // 1e-8 * ||L_mask v||_inf
  bool pass() const { return min_pointwise_margin >= -tolerance; }
};

/// Pointwise comparison L_mask v >= L_ambient v for v >= 0. Meaningful on
/// resolved (smooth) data; at lattice frequencies the two symbols
/// legitimately differ by O(1) factors.
inline DominationReport check_navier_dominates(const NavierOperator& navier,
                                               const RestrictedOperator& restricted,
                                               const Vector& v) {
  if (!(navier.mask() == restricted.mask()))
    throw std::invalid_argument("check_navier_dominates: operators live on different masks");
  if (navier.order() != restricted.order())
    throw std::invalid_argument("check_navier_dominates: fractional order mismatch");
  if (min_elem(v) < 0.0)
    throw std::invalid_argument("check_navier_dominates: v must be nonnegative");
  const Vector ln = navier.apply(v);
  const Vector lr = restricted.apply(v);
  DominationReport rep{};
  rep.tolerance = 1e-8 * max_abs(ln);
  rep.min_pointwise_margin = ln[0] - lr[0];
  for (std::size_t i = 1; i < ln.size(); ++i)
    rep.min_pointwise_margin = std::min(rep.min_pointwise_margin, ln[i] - lr[i]);
  rep.form_margin = (dot(ln, v) - dot(lr, v)) * navier.weight();
  return rep;
}

}  // namespace fracvi
