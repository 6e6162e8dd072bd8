#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracvi/extension.hpp"
#include "fracvi/grid.hpp"
#include "fracvi/linalg.hpp"
#include "fracvi/restricted.hpp"
#include "fracvi/rng.hpp"
#include "fracvi/spectral.hpp"
#include "fracvi/vi.hpp"

namespace fracvi {

enum class CheckStatus { Pass, WeakPass, VacuousPass, Fail };

inline const char* status_name(CheckStatus st) {
  switch (st) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::WeakPass: return "weak-pass";
    case CheckStatus::VacuousPass: return "vacuous-pass";
    case CheckStatus::Fail: return "fail";
  }
  return "unknown";
}

inline bool check_passed(CheckStatus st) { return st != CheckStatus::Fail; }

/// Outcome of one machine-checked discrete property. `margin` is the
/// worst case over nodes and instances, oriented so that positive means
/// the inequality holds with room. Strict inequalities landing between
/// -tolerance and the strictness floor report "weak-pass", never a
/// silent pass.
struct TheoremReport {
  std::string id;
  std::string instance;
  double margin = 0.0;
  double tolerance = 0.0;
  double strictness_floor = 0.0;
  bool strict_expected = false;
  CheckStatus status = CheckStatus::Pass;
  nlohmann::json extra;  // check-specific detail

  bool passed() const { return check_passed(status); }
};

inline nlohmann::json report_to_json(const TheoremReport& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["instance"] = r.instance;
  j["margin"] = r.margin;
  j["tolerance"] = r.tolerance;
  j["strictness_floor"] = r.strictness_floor;
  j["strict_expected"] = r.strict_expected;
  j["status"] = status_name(r.status);
  if (!r.extra.is_null()) j["extra"] = r.extra;
  return j;
}

namespace detail {

inline TheoremReport classify(std::string id, std::string instance, double margin, double scale,
                              bool strict, nlohmann::json extra = {}) {
  TheoremReport r;
  r.id = std::move(id);
  r.instance = std::move(instance);
  r.margin = margin;
  r.tolerance = 1e-8 * scale;
  r.strictness_floor = 1e-12 * scale;
  r.strict_expected = strict;
  r.extra = std::move(extra);
  if (margin < -r.tolerance)
    r.status = CheckStatus::Fail;
  else if (strict && margin < r.strictness_floor)
    r.status = CheckStatus::WeakPass;
  else
    r.status = CheckStatus::Pass;
  return r;
}

inline TheoremReport vacuous(std::string id, std::string instance, std::string why) {
  TheoremReport r;
  r.id = std::move(id);
  r.instance = std::move(instance);
  r.status = CheckStatus::VacuousPass;
  r.extra = {{"vacuous_reason", std::move(why)}};
  return r;
}

inline std::string describe(const DomainMask& mask, double s) {
  const BoxGrid& g = mask.grid();
  std::string d = std::to_string(g.dim()) + "D m=" + std::to_string(mask.size());
  d += " s=" + std::to_string(s).substr(0, 4);
  return d;
}

}  // namespace detail

/// Discrete analog of the uniform positivity set: node i belongs to P[v]
/// when v >= epsilon on the whole radius-rho cell neighborhood of i, and
/// that neighborhood stays inside the mask (the implicit exterior value 0
/// fails the threshold).
struct PositivitySet {
  double epsilon;
  int radius;
  std::vector<int> nodes;  // local mask indices

  bool empty() const { return nodes.empty(); }
};

inline PositivitySet positivity_set(const DomainMask& mask, const Vector& v, int radius = 1,
                                    double epsilon = -1.0) {
  if (v.size() != static_cast<std::size_t>(mask.size()))
    throw std::invalid_argument("positivity_set: vector does not live on the mask");
  if (min_elem(v) < 0.0) throw std::invalid_argument("positivity_set: v must be nonnegative");
  if (epsilon < 0.0) epsilon = 1e-3 * max_abs(v);
  const BoxGrid& g = mask.grid();
  PositivitySet ps{epsilon, radius, {}};
  for (int i = 0; i < mask.size(); ++i) {
    const int node = mask.indices()[i];
    const int ix = g.axis_index(node, 0);
    const int iy = g.dim() == 2 ? g.axis_index(node, 1) : 0;
    bool member = true;
    for (int dx = -radius; dx <= radius && member; ++dx) {
      for (int dy = -radius; dy <= radius && member; ++dy) {
        if (g.dim() == 1 && dy != 0) continue;
        const int jx = ix + dx, jy = iy + dy;
        if (jx < 0 || jx >= g.nodes(0) || (g.dim() == 2 && (jy < 0 || jy >= g.nodes(1)))) {
          member = false;  // neighborhood reaches the boundary layer (value 0)
          break;
        }
        const int loc = mask.local_index(g.linear_index(jx, jy));
        if (loc < 0 || v[static_cast<std::size_t>(loc)] < epsilon) member = false;
      }
    }
    if (member) ps.nodes.push_back(i);
  }
  return ps;
}

// --- operator-level checks ---------------------------------------------------

/// Domain monotonicity, eigenvalue convergence, form convergence along a
/// shrinking family, and the truncation inequalities, on 1D instances per
/// (size, s) plus one fixed 2D disc instance per s.
inline std::vector<TheoremReport> check_operator_theorems(std::uint64_t seed,
                                                          const std::vector<int>& sizes,
                                                          const std::vector<double>& s_list) {
  std::vector<TheoremReport> out;
  SplitMix64 root(seed);

  for (int n : sizes) {
    BoxGrid grid(0.0, 1.0, n);
    const double h = grid.spacing(0);
    DomainMask full = full_mask(grid);
    DomainMask base = build_mask(grid, [](std::array<double, 2> c) {
      return c[0] > 0.25 && c[0] < 0.75;
    });
    auto base_dec = std::make_shared<SpectralDecomposition>(eigendecompose(base));
    auto full_dec = std::make_shared<SpectralDecomposition>(eigendecompose(full));

    for (double s : s_list) {
      const std::string inst = detail::describe(base, s);
      NavierOperator op_base(base_dec, s);
      NavierOperator op_full(full_dec, s, false);

      // first eigenmode of the sub-domain, sign-normalized nonnegative
      Vector u = base_dec->mode(0);
      if (u[u.size() / 2] < 0.0)
        for (auto& x : u) x = -x;
      const Vector u_ext = extend_by_zero(u, base, full);

      // (a) the form on the smaller domain strictly dominates
      const double q_base = op_base.quadratic_form(u);
      const double q_full = op_full.quadratic_form(u_ext);
      out.push_back(detail::classify("domain_monotonicity.form", inst, q_base - q_full, q_base,
                                     true));

      // (b) pointwise version for nonnegative u
      {
        const Vector lb = op_base.apply(u);
        const Vector lf = restrict_to(op_full.apply(u_ext), full, base);
        double margin = lb[0] - lf[0];
        for (std::size_t i = 1; i < lb.size(); ++i) margin = std::min(margin, lb[i] - lf[i]);
        out.push_back(detail::classify("domain_monotonicity.pointwise", inst, margin,
                                       max_abs(lb), true));
      }

      // shrinking family at radii (8h, 4h, 2h, h)
      NestedFamily fam = make_shrinking_family(base, full, {8 * h, 4 * h, 2 * h, h});

      // (c) eigenvalue convergence: |lambda_j(member) - lambda_j(base)|
      // shrinks as the dilation radius shrinks, first five modes
      {
        std::vector<Vector> errs;
        for (const DomainMask& member : fam.members) {
          SpectralDecomposition dec = eigendecompose(member);
          Vector e;
          for (int j = 0; j < std::min(5, base.size()); ++j)
            e.push_back(std::abs(dec.eigenvalues[j] - base_dec->eigenvalues[j]));
          errs.push_back(std::move(e));
        }
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < errs.size(); ++k)
          for (std::size_t j = 0; j < errs[k].size(); ++j)
            margin = std::min(margin, errs[k - 1][j] - errs[k][j]);
        out.push_back(detail::classify("eigenvalue_convergence", inst, margin,
                                       base_dec->eigenvalues[0], false,
                                       {{"errors_first_mode",
                                         {errs[0][0], errs[1][0], errs[2][0], errs[3][0]}}}));
      }

      // (d) forms of the shrinking domains increase monotonically toward
      // the base form; the residual gap ratio is reported, not asserted
      {
        std::vector<double> forms;
        for (const DomainMask& member : fam.members) {
          NavierOperator op_m(member, s, false);
          forms.push_back(op_m.quadratic_form(extend_by_zero(u, base, member)));
        }
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < forms.size(); ++k)
          margin = std::min(margin, forms[k] - forms[k - 1]);
        margin = std::min(margin, q_base - forms.back());
        const double gap_first = q_base - forms.front();
        const double gap_last = q_base - forms.back();
        out.push_back(detail::classify(
            "form_gamma_limit.monotone", inst, margin, q_base, true,
            {{"forms", forms},
             {"base_form", q_base},
             {"gap_ratio", gap_first > 0.0 ? gap_last / gap_first : 0.0}}));
      }

      // (e) truncation inequalities on random sign-changing v with shift m
      {
        SplitMix64 rng = root.split("truncation/" + inst);
        double m1 = std::numeric_limits<double>::infinity();
        double m2 = m1, m3 = m1;
        NavierOperator op(full_dec, s, false);
        const int draws = 20;
        for (int t = 0; t < draws; ++t) {
          Vector v = rng.normal_vector(static_cast<std::size_t>(n));
          const double vmax = max_elem(v), vmin = min_elem(v);
          if (vmax <= 0.0 || vmin >= 0.0) continue;  // needs a sign change
          const double m_plus = rng.uniform(0.0, 0.5 * (-vmin));  // v+m changes sign
          const double m_minus = rng.uniform(0.0, 0.5 * vmax);    // v-m changes sign
          const double w = op.weight();
          const Vector lv = op.apply(v);

          Vector neg(v.size()), pos(v.size()), cap(v.size());
          for (std::size_t i = 0; i < v.size(); ++i) {
            neg[i] = std::max(-(v[i] + m_plus), 0.0);
            pos[i] = std::max(v[i] - m_minus, 0.0);
            cap[i] = std::min(v[i], m_minus);
          }
          m1 = std::min(m1, -(dot(lv, neg) * w + op.quadratic_form(neg)));
          m2 = std::min(m2, dot(lv, pos) * w - op.quadratic_form(pos));
          m3 = std::min(m3, op.quadratic_form(v) - op.quadratic_form(pos) -
                                op.quadratic_form(cap));
        }
        const double scale = 1.0 + std::abs(m1) + std::abs(m2) + std::abs(m3);
        out.push_back(detail::classify("truncation.lower_cut", inst, m1, scale, true));
        out.push_back(detail::classify("truncation.upper_cut", inst, m2, scale, true));
        out.push_back(detail::classify("truncation.capped_energy", inst, m3, scale, true));
      }
    }
  }

  // one 2D instance (disc inside a square) exercising the dense eigensolver
  {
    BoxGrid grid2({0.0, 0.0}, {1.0, 1.0}, {9, 9});
    DomainMask square = full_mask(grid2);
    DomainMask disc = build_mask(grid2, [](std::array<double, 2> c) {
      const double dx = c[0] - 0.5, dy = c[1] - 0.5;
      return dx * dx + dy * dy < 0.35 * 0.35;
    });
    auto disc_dec = std::make_shared<SpectralDecomposition>(eigendecompose(disc));
    auto square_dec = std::make_shared<SpectralDecomposition>(eigendecompose(square));
    for (double s : s_list) {
      const std::string inst = detail::describe(disc, s);
      NavierOperator op_d(disc_dec, s, false);
      NavierOperator op_sq(square_dec, s, false);
      Vector u = disc_dec->mode(0);
      if (u[u.size() / 2] < 0.0)
        for (auto& x : u) x = -x;
      const Vector u_ext = extend_by_zero(u, disc, square);
      const double qd = op_d.quadratic_form(u);
      out.push_back(detail::classify("domain_monotonicity.form", inst,
                                     qd - op_sq.quadratic_form(u_ext), qd, true));
      const Vector lb = op_d.apply(u);
      const Vector lf = restrict_to(op_sq.apply(u_ext), square, disc);
      double margin = lb[0] - lf[0];
      for (std::size_t i = 1; i < lb.size(); ++i) margin = std::min(margin, lb[i] - lf[i]);
      out.push_back(detail::classify("domain_monotonicity.pointwise", inst, margin, max_abs(lb),
                                     true));
    }
  }
  return out;
}

// --- VI-level checks ---------------------------------------------------------

namespace detail {

/// Smooth bump obstacle plus mild noise, and a small random forcing.
inline void random_instance(SplitMix64& rng, const BoxGrid& grid, Vector& psi, Vector& f) {
  const int n = grid.nodes(0);
  psi.assign(static_cast<std::size_t>(n), 0.0);
  f.assign(static_cast<std::size_t>(n), 0.0);
  const double center = rng.uniform(0.3, 0.7);
  for (int i = 0; i < n; ++i) {
    const double x = grid.coord(0, i);
    psi[i] = std::exp(-50.0 * (x - center) * (x - center)) + 0.2 * rng.normal();
    f[i] = rng.normal();
  }
}

}  // namespace detail

/// Equivalent formulations of the obstacle problem, continuous dependence
/// on the obstacle, and the two-sided solution bounds.
inline std::vector<TheoremReport> check_vi_theorems(std::uint64_t seed,
                                                    const std::vector<int>& sizes,
                                                    const std::vector<double>& s_list) {
  std::vector<TheoremReport> out;
  SplitMix64 root(seed);

  for (int n : sizes) {
    BoxGrid grid(0.0, 1.0, n);
    DomainMask mask = full_mask(grid);
    auto dec = std::make_shared<SpectralDecomposition>(eigendecompose(mask));

    for (double s : s_list) {
      const std::string inst = detail::describe(mask, s);
      auto op = std::make_shared<const NavierOperator>(dec, s);
      SplitMix64 rng = root.split("vi/" + inst);

      Vector psi, f;
      detail::random_instance(rng, grid, psi, f);
      ObstacleProblem prob{OperatorHandle(op), psi, f};
      const Solution sol = solve_psor(prob);
      const double scale = 1.0 + max_abs(sol.u) + max_abs(f);
      const double w = mask.weight();

      // (a) the solution is below every supersolution in the cone; the
      // candidates are unconstrained solves of f + g lifted into the cone
      // by a nonnegative constant shift (which preserves supersolutions
      // because the operator maps constants to nonnegative vectors)
      {
        double margin = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 20; ++t) {
          Vector g = rng.nonnegative_vector(static_cast<std::size_t>(n));
          for (auto& x : g)
            if (rng.uniform() < 0.6) x = 0.0;  // sparse, stresses the contact boundary
          Vector rhs(f);
          for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += g[i];
          Vector cap = op->solve(rhs);
          double shift = 0.0;
          for (std::size_t i = 0; i < cap.size(); ++i) shift = std::max(shift, psi[i] - cap[i]);
          for (auto& x : cap) x += shift;
          for (std::size_t i = 0; i < cap.size(); ++i)
            margin = std::min(margin, cap[i] - sol.u[i]);
        }
        out.push_back(detail::classify("smallest_supersolution", inst, margin, scale, false));
      }

      // (b) and (c): multiplier orthogonality and the one-sided variational
      // characterization, over random cone members
      {
        double margin_b = std::numeric_limits<double>::infinity();
        double margin_c = margin_b;
        for (int t = 0; t < 20; ++t) {
          Vector v(sol.u);
          if (t % 2 == 0) {
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += std::abs(rng.normal());
          } else {
            for (std::size_t i = 0; i < v.size(); ++i)
              v[i] = std::max(psi[i], v[i] + rng.normal());
          }
          Vector diff(v.size()), diff_neg(v.size());
          for (std::size_t i = 0; i < v.size(); ++i) {
            diff[i] = v[i] - sol.u[i];
            diff_neg[i] = std::max(-diff[i], 0.0);
          }
          margin_b = std::min(margin_b, -std::abs(dot(sol.mu, diff_neg) * w));
          Vector lv = op->apply(v);
          for (std::size_t i = 0; i < lv.size(); ++i) lv[i] -= f[i];
          margin_c = std::min(margin_c, dot(lv, diff) * w);
        }
        out.push_back(detail::classify("multiplier_orthogonality", inst, margin_b, scale, false));
        out.push_back(
            detail::classify("one_sided_variational_inequality", inst, margin_c, scale, false));
      }

      // (d) sup-norm stability in the obstacle, two-sided and one-sided
      {
        double margin = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 10; ++t) {
          Vector psi2(psi);
          for (auto& x : psi2) x += 0.3 * rng.normal();
          const Solution sol2 = solve_psor(ObstacleProblem{OperatorHandle(op), psi2, f});
          double du_max = 0.0, du_pos = 0.0, du_neg = 0.0;
          double dpsi_max = 0.0, dpsi_pos = 0.0, dpsi_neg = 0.0;
          for (std::size_t i = 0; i < psi.size(); ++i) {
            const double du = sol.u[i] - sol2.u[i];
            const double dp = psi[i] - psi2[i];
            du_max = std::max(du_max, std::abs(du));
            du_pos = std::max(du_pos, du);
            du_neg = std::max(du_neg, -du);
            dpsi_max = std::max(dpsi_max, std::abs(dp));
            dpsi_pos = std::max(dpsi_pos, dp);
            dpsi_neg = std::max(dpsi_neg, -dp);
          }
          margin = std::min({margin, dpsi_max - du_max, dpsi_pos - du_pos, dpsi_neg - du_neg});
        }
        out.push_back(detail::classify("obstacle_stability", inst, margin, scale, false));
      }

      // (e) two-sided bounds: psi v omega_f <= u, and for f = 0 the
      // sup-norm bound by the positive part of the obstacle
      {
        const Vector omega_f = op->solve(f);
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < psi.size(); ++i)
          margin = std::min(margin, sol.u[i] - std::max(psi[i], omega_f[i]));

        const Solution sol0 = solve_psor(ObstacleProblem{OperatorHandle(op), psi,
                                                         Vector(psi.size(), 0.0)});
        double psi_plus_max = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
          margin = std::min(margin, sol0.u[i] - std::max(psi[i], 0.0));
          psi_plus_max = std::max(psi_plus_max, psi[i]);
        }
        margin = std::min(margin, psi_plus_max - max_elem(sol0.u));
        out.push_back(detail::classify("solution_bounds", inst, margin, scale, false));
      }

      // (f) uniformly converging obstacles give energy-converging solutions
      {
        Vector bump(psi.size());
        for (std::size_t i = 0; i < bump.size(); ++i) bump[i] = std::abs(rng.normal());
        std::vector<double> gaps;
        for (double delta : {0.4, 0.2, 0.1, 0.05}) {
          Vector psih(psi);
          for (std::size_t i = 0; i < psih.size(); ++i) psih[i] += delta * bump[i];
          const Solution solh = solve_psor(ObstacleProblem{OperatorHandle(op), psih, f});
          Vector diff(psi.size());
          for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = solh.u[i] - sol.u[i];
          gaps.push_back(op->quadratic_form(diff));
        }
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < gaps.size(); ++k)
          margin = std::min(margin, gaps[k - 1] - gaps[k]);
        out.push_back(detail::classify("obstacle_continuity.energy", inst, margin, scale, false,
                                       {{"energy_gaps", gaps}}));
      }
    }
  }
  return out;
}

// --- multiplier regularity checks --------------------------------------------

/// Two-sided multiplier bounds, support localization on the contact set,
/// and the penalty-route consistency check.
inline std::vector<TheoremReport> check_regularity_theorems(std::uint64_t seed,
                                                            const std::vector<int>& sizes,
                                                            const std::vector<double>& s_list) {
  std::vector<TheoremReport> out;
  SplitMix64 root(seed);

  for (int n : sizes) {
    BoxGrid grid(0.0, 1.0, n);
    DomainMask mask = full_mask(grid);
    auto dec = std::make_shared<SpectralDecomposition>(eigendecompose(mask));

    for (double s : s_list) {
      const std::string inst = detail::describe(mask, s);
      auto op = std::make_shared<const NavierOperator>(dec, s);
      SplitMix64 rng = root.split("regularity/" + inst);

      double margin_ls = std::numeric_limits<double>::infinity();
      double margin_literal = margin_ls;
      double margin_loc = margin_ls;
      double scale = 1.0;
      for (int t = 0; t < 10; ++t) {
        Vector psi, f;
        detail::random_instance(rng, grid, psi, f);
        ObstacleProblem prob{OperatorHandle(op), psi, f};
        const Solution sol = solve_psor(prob);
        scale = std::max(scale, 1.0 + max_abs(sol.mu) + max_abs(f));

        const Vector omega_f = op->solve(f);
        Vector shifted(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i)
          shifted[i] = std::max(psi[i] - omega_f[i], 0.0);
        const Vector bound = positive_part(op->apply(shifted));

        const double delta = 1e-6 * (1.0 + max_abs(sol.u));
        for (std::size_t i = 0; i < psi.size(); ++i) {
          margin_ls = std::min({margin_ls, sol.mu[i], bound[i] - sol.mu[i]});
          // bound as literally printed upstream; known to fail when f > 0
          // on the contact set, reported for transparency only
          margin_literal = std::min(margin_literal, std::max(bound[i] - f[i], 0.0) - sol.mu[i]);
          if (sol.u[i] > psi[i] + delta) margin_loc = std::min(margin_loc, -sol.mu[i]);
        }
      }
      out.push_back(detail::classify("lewy_stampacchia", inst, margin_ls, scale, false,
                                     {{"literal_bound_margin", margin_literal}}));
      out.push_back(detail::classify("multiplier_localization", inst, margin_loc, scale, false));

      // penalty route: the penalized solution obeys the same two-sided
      // bound once the tolerance absorbs the eps-sandwich slack
      {
        Vector psi, f;
        detail::random_instance(rng, grid, psi, f);
        ObstacleProblem prob{OperatorHandle(op), psi, f};
        PenaltyConfig cfg;
        cfg.epsilon = 1e-2;
        const Solution sol_eps = solve_penalty(prob, cfg);

        const Vector omega_f = op->solve(f);
        Vector shifted(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i)
          shifted[i] = std::max(psi[i] - omega_f[i], 0.0);
        const Vector bound = positive_part(op->apply(shifted));

        const Matrix& a = op->matrix();
        double row_norm = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < a.cols(); ++j) acc += std::abs(a(i, j));
          row_norm = std::max(row_norm, acc);
        }
        const double slack = cfg.epsilon * row_norm;  // |mu_eps - mu| <= eps ||L||_inf
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < psi.size(); ++i)
          margin = std::min({margin, sol_eps.mu[i] + slack, bound[i] + slack - sol_eps.mu[i]});
        out.push_back(detail::classify("lewy_stampacchia.penalty_route", inst, margin,
                                       1.0 + max_abs(sol_eps.mu), false,
                                       {{"epsilon", cfg.epsilon}, {"slack", slack}}));
      }
    }
  }
  return out;
}

// --- mask operator vs ambient operator on obstacle problems -------------------

/// Solves the obstacle problem under both operators (same mask, same
/// obstacle, zero forcing) and checks the ordering, the positivity-set
/// statements, the re-solve property, and the energy chain.
inline std::vector<TheoremReport> check_navier_dirichlet(std::uint64_t seed,
                                                         const std::vector<int>& sizes,
                                                         const std::vector<double>& s_list) {
  std::vector<TheoremReport> out;
  (void)seed;  // instances are deterministic bump obstacles

  for (int n : sizes) {
    // the ambient operator is the big-box backend: same discrete Dirichlet
    // family on a strictly larger box, so the pointwise domination that
    // drives every statement below is entrywise-exact (the kernel-sum
    // backend carries O(h^{2-2s}) consistency error that breaks the
    // ordering near the free boundary for large s)
    const int big = 2 * (n + 1) - 1, offset = (n + 1) / 2;
    BoxGrid grid(0.0, 1.0, big);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = offset + i;
    DomainMask mask(grid, idx);
    auto dec = std::make_shared<SpectralDecomposition>(eigendecompose(mask));

    // obstacle: indicator bump on the middle third of the sub-box
    Vector psi(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      const double t = (i + 1.0) / (n + 1.0);  // position relative to the sub-box
      if (t > 1.0 / 3.0 && t < 2.0 / 3.0) psi[i] = 1.0;
    }
    const Vector zero(static_cast<std::size_t>(n), 0.0);

    for (double s : s_list) {
      if (!(s < 1.0)) continue;  // the ambient-space operator needs s < 1
      const std::string inst = detail::describe(mask, s);
      auto navier = std::make_shared<const NavierOperator>(dec, s);
      auto restricted = std::make_shared<const RestrictedOperator>(
          RestrictedOperator::big_box(mask, s, full_mask(grid)));

      // tight solves so the multiplier test on the positivity set is not
      // limited by the stopping tolerance
      ObstacleProblem prob_n{OperatorHandle(navier), psi, zero};
      ObstacleProblem prob_d{OperatorHandle(restricted), psi, zero};
      const Solution sol_n = solve_psor(prob_n, 1e-3 * default_tolerance(prob_n));
      const Solution sol_d = solve_psor(prob_d, 1e-3 * default_tolerance(prob_d));
      const double scale = 1.0 + max_abs(sol_d.u);

      // (a) ordering u_N <= u_D
      {
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < psi.size(); ++i)
          margin = std::min(margin, sol_d.u[i] - sol_n.u[i]);
        out.push_back(detail::classify("mask_vs_ambient.ordering", inst, margin, scale, false));
      }

      // (b) on the positivity set of u_N - psi the multiplier vanishes and
      // the ordering is strict
      {
        Vector gap(psi.size());
        for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = std::max(sol_n.u[i] - psi[i], 0.0);
        const PositivitySet ps = positivity_set(mask, gap);
        if (ps.empty()) {
          out.push_back(detail::vacuous("mask_vs_ambient.positivity_set", inst,
                                        "positivity set of u_N - psi is empty"));
        } else {
          double mu_sup = 0.0;
          double margin_strict = std::numeric_limits<double>::infinity();
          for (int i : ps.nodes) {
            mu_sup = std::max(mu_sup, std::abs(sol_n.mu[i]));
            margin_strict = std::min(margin_strict, sol_d.u[i] - sol_n.u[i]);
          }
          const double mu_scale = 1.0 + max_abs(sol_n.mu);
          const double margin =
              mu_sup <= 1e-8 * mu_scale ? margin_strict : -mu_sup / mu_scale;
          out.push_back(detail::classify("mask_vs_ambient.positivity_set", inst, margin, scale,
                                         true,
                                         {{"set_size", ps.nodes.size()},
                                          {"multiplier_sup", mu_sup},
                                          {"strict_gap", margin_strict}}));
        }
      }

      // (c) re-solving the ambient problem with obstacle u_N returns u_D
      {
        const Solution sol_d2 =
            solve_psor(ObstacleProblem{OperatorHandle(restricted), sol_n.u, zero});
        double err = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i)
          err = std::max(err, std::abs(sol_d2.u[i] - sol_d.u[i]));
        out.push_back(detail::classify("mask_vs_ambient.resolve", inst, -err, scale, false));
      }

      // (d) energy chain: ambient form of u_D <= ambient form of u_N
      // < mask form of u_N <= mask form of u_D
      {
        const double e1 = restricted->quadratic_form(sol_d.u);
        const double e2 = restricted->quadratic_form(sol_n.u);
        const double e3 = navier->quadratic_form(sol_n.u);
        const double e4 = navier->quadratic_form(sol_d.u);
        const double margin = std::min({e2 - e1, e3 - e2, e4 - e3});
        out.push_back(detail::classify("mask_vs_ambient.energy_chain", inst, margin, e3, true,
                                       {{"energies", {e1, e2, e3, e4}}}));
      }

      // (e) a sub-box where the obstacle vanishes lies inside the
      // positivity set (interior nodes only)
      {
        Vector gap(psi.size());
        for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = std::max(sol_n.u[i] - psi[i], 0.0);
        const PositivitySet ps = positivity_set(mask, gap);
        if (ps.empty()) {
          out.push_back(detail::vacuous("mask_vs_ambient.zero_obstacle_inclusion", inst,
                                        "positivity set of u_N - psi is empty"));
        } else {
          // B = nodes at relative position t in (0.05, 0.28); psi vanishes there
          int missing = 0, members = 0;
          for (int i = 0; i < n; ++i) {
            const auto rel = [n](int k) { return (k + 1.0) / (n + 1.0); };
            if (!(rel(i) > 0.05 && rel(i) < 0.28)) continue;
            if (!(rel(std::max(i - 1, 0)) > 0.05 && rel(std::min(i + 1, n - 1)) < 0.28))
              continue;  // keep interior of B only
            ++members;
            if (!std::binary_search(ps.nodes.begin(), ps.nodes.end(), i)) ++missing;
          }
          out.push_back(detail::classify("mask_vs_ambient.zero_obstacle_inclusion", inst,
                                         missing == 0 ? 0.0 : -static_cast<double>(missing),
                                         1.0, false,
                                         {{"subbox_nodes", members}, {"missing", missing}}));
        }
      }
    }
  }
  return out;
}

// --- extension identity checks ------------------------------------------------

/// Trace accuracy against the exact half-order solution, calibration of
/// the trace constant, the trace scaling law, and the energy identity
/// under y-mesh refinement.
inline std::vector<TheoremReport> check_extension_identities(std::uint64_t seed,
                                                             const std::vector<double>& s_list) {
  std::vector<TheoremReport> out;
  SplitMix64 root(seed);

  // s = 1/2 has the closed-form profile e^{-sqrt(lambda) y}; the trace is
  // sqrt(lambda) exactly
  for (double lambda : {1.0, 4.0}) {
    const double s = 0.5;
    GradedMesh mesh = make_graded_mesh(s, default_extent(lambda), 400);
    const double trace = neumann_trace(solve_mode_ode(s, lambda, std::move(mesh)));
    const double exact = std::sqrt(lambda);
    const double relerr = std::abs(trace - exact) / exact;
    out.push_back(detail::classify("extension.trace_half_order",
                                   "lambda=" + std::to_string(lambda).substr(0, 3),
                                   1e-3 - relerr, 1.0, false,
                                   {{"trace", trace}, {"exact", exact}}));
  }

  for (double s : s_list) {
    if (!(s < 1.0)) continue;
    const std::string inst = "s=" + std::to_string(s).substr(0, 4);

    // calibration vs the closed-form constant, 0.5% target
    {
      const double cs = 1.0 / reference_trace(s, 1.0);
      const double closed = trace_constant_closed_form(s);
      const double relerr = std::abs(cs - closed) / closed;
      out.push_back(detail::classify("extension.calibration", inst, 0.005 - relerr, 1.0, false,
                                     {{"calibrated", cs}, {"closed_form", closed}}));
    }

    // scaling law: c_s * trace(lambda) ~ lambda^s
    {
      const double cs = calibrate_cs(s);
      double worst = 0.0;
      for (double lambda : {1.0, 4.0, 16.0}) {
        const double trace = reference_trace(s, lambda, 400);
        worst = std::max(worst, std::abs(cs * trace / std::pow(lambda, s) - 1.0));
      }
      out.push_back(detail::classify("extension.trace_scaling", inst, 1e-2 - worst, 1.0, false,
                                     {{"worst_relative_error", worst}}));
    }

    // energy identity on a random vector, error below 2% and decreasing
    // under refinement of the y-mesh
    {
      SplitMix64 rng = root.split("extension/" + inst);
      BoxGrid grid(0.0, 1.0, 31);
      NavierOperator op(full_mask(grid), s, false);
      const Vector v = rng.normal_vector(31);
      const double err_coarse = energy_identity_check(op, v, 200);
      const double err_fine = energy_identity_check(op, v, 400);
      const double margin = std::min(2e-2 - err_fine, err_coarse - err_fine);
      out.push_back(detail::classify("extension.energy_identity", inst, margin, 1.0, false,
                                     {{"error_coarse", err_coarse}, {"error_fine", err_fine}}));
    }

    // profile shape: strictly decreasing interior values in (0,1), and the
    // first interior value decreasing in lambda
    {
      double margin = std::numeric_limits<double>::infinity();
      double prev_first = 2.0;
      const GradedMesh shared = make_graded_mesh(s, default_extent(1.0), 200);
      for (double lambda : {1.0, 4.0, 16.0}) {
        ModeProfile prof = solve_mode_ode(s, lambda, shared);
        for (std::size_t j = 1; j + 1 < prof.theta.size(); ++j) {
          margin = std::min({margin, prof.theta[j], 1.0 - prof.theta[j],
                             prof.theta[j - 1] - prof.theta[j]});
        }
        margin = std::min(margin, prev_first - prof.theta[1]);
        prev_first = prof.theta[1];
      }
      out.push_back(detail::classify("extension.profile_shape", inst, margin, 1.0, true));
    }
  }
  return out;
}

}  // namespace fracvi
