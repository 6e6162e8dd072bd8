#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "fracvi/grid.hpp"
#include "fracvi/linalg.hpp"
#include "fracvi/restricted.hpp"
#include "fracvi/spectral.hpp"

namespace fracvi {

/// Type-erased handle over the two operator families. Solvers only need the
/// mask, the order, the materialized matrix, and apply/solve.
class OperatorHandle {
 public:
  OperatorHandle(std::shared_ptr<const NavierOperator> op) : op_(std::move(op)) {}
  OperatorHandle(std::shared_ptr<const RestrictedOperator> op) : op_(std::move(op)) {}
  OperatorHandle(NavierOperator op)
      : op_(std::make_shared<const NavierOperator>(std::move(op))) {}
  OperatorHandle(RestrictedOperator op)
      : op_(std::make_shared<const RestrictedOperator>(std::move(op))) {}

  const DomainMask& mask() const {
    return std::visit([](const auto& p) -> const DomainMask& { return p->mask(); }, op_);
  }
  double order() const {
    return std::visit([](const auto& p) { return p->order(); }, op_);
  }
  int size() const { return mask().size(); }
  double weight() const { return mask().weight(); }

  const Matrix& matrix() const {
    return std::visit([](const auto& p) -> const Matrix& { return p->matrix(); }, op_);
  }

  Vector apply(const Vector& v) const {
    return std::visit([&](const auto& p) { return p->apply(v); }, op_);
  }

  double quadratic_form(const Vector& v) const {
    return std::visit([&](const auto& p) { return p->quadratic_form(v); }, op_);
  }

  /// Unconstrained solve L u = f. Mode-series operators invert spectrally;
  /// otherwise a Cholesky factorization of the matrix is built once.
  Vector solve(const Vector& f) const {
    if (auto* nav = std::get_if<std::shared_ptr<const NavierOperator>>(&op_))
      return (*nav)->solve(f);
    if (!chol_) chol_ = std::make_shared<CholeskyFactor>(matrix());
    return chol_->solve(f);
  }

  bool is_mode_series() const {
    return std::holds_alternative<std::shared_ptr<const NavierOperator>>(op_);
  }

 private:
  std::variant<std::shared_ptr<const NavierOperator>, std::shared_ptr<const RestrictedOperator>>
      op_;
  mutable std::shared_ptr<CholeskyFactor> chol_;
};

/// Discrete obstacle problem: minimize 1/2 <L v, v> - <f, v> over {v >= psi}.
/// The feasible cone is always nonempty componentwise.
struct ObstacleProblem {
  OperatorHandle op;
  Vector psi;
  Vector f;

  ObstacleProblem(OperatorHandle o, Vector obstacle, Vector forcing)
      : op(std::move(o)), psi(std::move(obstacle)), f(std::move(forcing)) {
    const auto m = static_cast<std::size_t>(op.size());
    if (psi.size() != m || f.size() != m)
      throw std::invalid_argument("ObstacleProblem: psi/f do not live on the operator mask");
  }
};

struct ResidualTriple {
  double primal;           // min_i (u - psi)_i, expect >= -tol
  double dual;             // min_i mu_i, expect >= -tol
  double complementarity;  // max_i mu_i (u - psi)_i, expect <= tol
};

struct Solution {
  Vector u;
  Vector mu;  // L u - f, the discrete multiplier
  ResidualTriple residuals;
  long iterations = 0;
  std::string method;
};

inline Vector positive_part(Vector v) {
  for (auto& x : v) x = std::max(x, 0.0);
  return v;
}

/// Default solver tolerance, scaled by the data magnitudes.
inline double default_tolerance(const ObstacleProblem& p) {
  return 1e-9 * (1.0 + max_abs(p.f) + max_abs(p.op.apply(positive_part(p.psi))));
}

inline ResidualTriple kkt_residuals(const ObstacleProblem& p, const Vector& u) {
  const Vector lu = p.op.apply(u);
  ResidualTriple r{};
  r.primal = u[0] - p.psi[0];
  r.dual = lu[0] - p.f[0];
  r.complementarity = (lu[0] - p.f[0]) * (u[0] - p.psi[0]);
  for (std::size_t i = 1; i < u.size(); ++i) {
    const double gap = u[i] - p.psi[i];
    const double mu = lu[i] - p.f[i];
    r.primal = std::min(r.primal, gap);
    r.dual = std::min(r.dual, mu);
    r.complementarity = std::max(r.complementarity, mu * gap);
  }
  return r;
}

namespace detail {

inline Solution finish_solution(const ObstacleProblem& p, Vector u, long iters,
                                std::string method) {
  Solution sol;
  sol.mu = p.op.apply(u);
  for (std::size_t i = 0; i < sol.mu.size(); ++i) sol.mu[i] -= p.f[i];
  sol.u = std::move(u);
  sol.residuals = kkt_residuals(p, sol.u);
  sol.iterations = iters;
  sol.method = std::move(method);
  return sol;
}

}  // namespace detail

constexpr long kPsorSweepCap = 200000;

/// Projected SOR. The projection keeps the primal residual exactly zero;
/// iteration stops when dual and complementarity residuals are within tol.
inline Solution solve_psor(const ObstacleProblem& p, double tol = -1.0, double relax = 1.5,
                           long sweep_cap = kPsorSweepCap) {
  if (!(relax > 0.0 && relax < 2.0)) throw std::invalid_argument("solve_psor: relax must be in (0,2)");
  if (tol < 0.0) tol = default_tolerance(p);
  const Matrix& a = p.op.matrix();
  const int m = p.op.size();
  Vector u(p.psi);
  for (int i = 0; i < m; ++i) u[i] = std::max(u[i], 0.0);

  for (long sweep = 1; sweep <= sweep_cap; ++sweep) {
    for (int i = 0; i < m; ++i) {
      const double* row = a.row(static_cast<std::size_t>(i));
      double r = p.f[i];
      for (int j = 0; j < m; ++j) r -= row[j] * u[j];
      u[i] = std::max(p.psi[i], u[i] + relax * r / row[i]);
    }
    ResidualTriple res = kkt_residuals(p, u);
    if (res.dual > -tol && res.complementarity < tol)
      return detail::finish_solution(p, std::move(u), sweep, "psor");
  }
  ResidualTriple res = kkt_residuals(p, u);
  throw std::runtime_error(
      "solve_psor: sweep cap reached; residuals dual=" + std::to_string(res.dual) +
      " complementarity=" + std::to_string(res.complementarity));
}

/// C1 cubic smoothstep penalty smoother: 1 for t <= 0, 0 for t >= eps.
inline double penalty_smoother(double t, double eps) {
  const double z = std::clamp(t / eps, 0.0, 1.0);
  return 1.0 - (3.0 * z * z - 2.0 * z * z * z);
}

struct PenaltyConfig {
  double epsilon = 1e-2;
  double alpha = 0.5;      // sweep under-relaxation
  long sweep_cap = 40000;
  int bisection_steps = 80;
};

/// Penalized equation L u = theta_eps(u - psi~) g with psi~ = (psi - w_f)+
/// and g = (L psi~)+, solved by nonlinear Gauss-Seidel: each node update is
/// the root of a strictly increasing scalar map (the matrix diagonal is
/// positive and the smoother is nonincreasing), found by bisection. The
/// solution is shifted back by w_f and certified against a PSOR reference:
/// u - tol <= u_eps <= u + eps + tol must hold, or the solver throws.
inline Solution solve_penalty(const ObstacleProblem& p, const PenaltyConfig& cfg,
                              const Solution* psor_reference = nullptr) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("solve_penalty: epsilon must be positive");
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
    throw std::invalid_argument("solve_penalty: alpha must be in (0,1]");
  const double tol = default_tolerance(p);
  const int m = p.op.size();
  const Matrix& a = p.op.matrix();

  const Vector omega_f = p.op.solve(p.f);
  Vector psi_shift(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) psi_shift[i] = std::max(p.psi[i] - omega_f[i], 0.0);
  const Vector g = positive_part(p.op.apply(psi_shift));

  Vector u(static_cast<std::size_t>(m), 0.0);
  const double sweep_tol = 1e-12 * (1.0 + max_abs(psi_shift) + max_abs(g));
  long sweeps = 0;
  for (long sweep = 1; sweep <= cfg.sweep_cap; ++sweep) {
    double delta = 0.0;
    for (int i = 0; i < m; ++i) {
      const double* row = a.row(static_cast<std::size_t>(i));
      const double aii = row[i];
      double off = -aii * u[i];
      for (int j = 0; j < m; ++j) off += row[j] * u[j];
      double root;
      if (g[i] == 0.0) {
        root = -off / aii;
      } else {
        // bracket from theta in [0,1]: aii*x + off in [0, g_i] at the root
        double lo = -off / aii - 1.0;
        double hi = (g[i] - off) / aii + 1.0;
        for (int it = 0; it < cfg.bisection_steps; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double resid = aii * mid + off - penalty_smoother(mid - psi_shift[i], cfg.epsilon) * g[i];
          (resid > 0.0 ? hi : lo) = mid;
        }
        root = 0.5 * (lo + hi);
      }
      const double next = u[i] + cfg.alpha * (root - u[i]);
      delta = std::max(delta, std::abs(next - u[i]));
      u[i] = next;
    }
    sweeps = sweep;
    if (delta <= sweep_tol) break;
    if (sweep == cfg.sweep_cap)
      throw std::runtime_error("solve_penalty: sweep cap reached without a fixed point");
  }

  for (int i = 0; i < m; ++i) u[i] += omega_f[i];

  std::optional<Solution> owned_ref;
  if (!psor_reference) {
    owned_ref = solve_psor(p);
    psor_reference = &*owned_ref;
  }
  for (int i = 0; i < m; ++i) {
    if (u[i] < psor_reference->u[i] - tol || u[i] > psor_reference->u[i] + cfg.epsilon + tol)
      throw std::runtime_error(
          "solve_penalty: sandwich violated at node " + std::to_string(i) +
          " (u_eps=" + std::to_string(u[i]) + ", u=" + std::to_string(psor_reference->u[i]) + ")");
  }
  return detail::finish_solution(p, std::move(u), sweeps, "penalty");
}

constexpr int kEnumerationCap = 15;

/// Brute-force reference solver: try every active set, solve the
/// equality-constrained KKT system, return the unique candidate passing
/// feasibility and dual-sign checks.
inline Solution solve_active_set_enum(const ObstacleProblem& p, double tol = -1.0) {
  const int m = p.op.size();
  if (m > kEnumerationCap)
    throw std::invalid_argument("solve_active_set_enum: mask too large for enumeration");
  if (tol < 0.0) tol = 1e3 * default_tolerance(p);
  const Matrix& a = p.op.matrix();

  for (unsigned long set = 0; set < (1ul << m); ++set) {
    std::vector<int> inactive;
    for (int i = 0; i < m; ++i)
      if (!(set >> i & 1u)) inactive.push_back(i);

    Vector u(p.psi);  // active nodes pinned to the obstacle
    if (!inactive.empty()) {
      const auto k = inactive.size();
      Matrix sub(k, k);
      Vector rhs(k);
      for (std::size_t r = 0; r < k; ++r) {
        rhs[r] = p.f[inactive[r]];
        for (int j = 0; j < m; ++j) {
          if (!(set >> j & 1u)) continue;
          rhs[r] -= a(static_cast<std::size_t>(inactive[r]), static_cast<std::size_t>(j)) * p.psi[j];
        }
        for (std::size_t c = 0; c < k; ++c)
          sub(r, c) = a(static_cast<std::size_t>(inactive[r]), static_cast<std::size_t>(inactive[c]));
      }
      Vector ui = CholeskyFactor(sub).solve(std::move(rhs));
      for (std::size_t r = 0; r < k; ++r) u[inactive[r]] = ui[r];
    }

    ResidualTriple res = kkt_residuals(p, u);
    if (res.primal >= -tol && res.dual >= -tol && res.complementarity <= tol)
      return detail::finish_solution(p, std::move(u), static_cast<long>(set) + 1,
                                     "active-set-enum");
  }
  throw std::runtime_error("solve_active_set_enum: no KKT-feasible active set found");
}

// --- serialization -----------------------------------------------------------

inline nlohmann::json solution_to_json(const Solution& sol) {
  nlohmann::json j;
  j["u"] = sol.u;
  j["mu"] = sol.mu;
  j["residuals"] = {{"primal", sol.residuals.primal},
                    {"dual", sol.residuals.dual},
                    {"complementarity", sol.residuals.complementarity}};
  j["iterations"] = sol.iterations;
  j["method"] = sol.method;
  return j;
}

}  // namespace fracvi
