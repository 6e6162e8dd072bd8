#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "fracvi/linalg.hpp"

namespace fracvi {

/// Uniform tensor grid on a box in 1D or 2D. Only interior nodes carry
/// unknowns; the boundary layer is implicit (homogeneous Dirichlet data).
class BoxGrid {
 public:
  BoxGrid(double lo, double hi, int interior_nodes)
      : dim_(1), lo_{lo, 0.0}, hi_{hi, 1.0}, nodes_{interior_nodes, 1} {
    validate();
  }

  BoxGrid(std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> interior_nodes)
      : dim_(2), lo_(lo), hi_(hi), nodes_(interior_nodes) {
    validate();
  }

  int dim() const { return dim_; }
  int nodes(int axis) const { return nodes_[axis]; }
  int num_interior() const { return dim_ == 1 ? nodes_[0] : nodes_[0] * nodes_[1]; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  double length(int axis) const { return hi_[axis] - lo_[axis]; }
  double spacing(int axis) const { return length(axis) / (nodes_[axis] + 1); }

  /// Cell-volume weight of the discrete inner product <u,v> = w * sum u_i v_i.
  double weight() const {
    double w = spacing(0);
    if (dim_ == 2) w *= spacing(1);
    return w;
  }

  /// Coordinate of interior node (per-axis index in [0, nodes)).
  double coord(int axis, int idx) const { return lo_[axis] + (idx + 1) * spacing(axis); }

  int linear_index(int ix, int iy = 0) const { return ix + nodes_[0] * iy; }
  int axis_index(int linear, int axis) const {
    return axis == 0 ? linear % nodes_[0] : linear / nodes_[0];
  }

  std::array<double, 2> node_coords(int linear) const {
    std::array<double, 2> c{coord(0, axis_index(linear, 0)), 0.0};
    if (dim_ == 2) c[1] = coord(1, axis_index(linear, 1));
    return c;
  }

  bool operator==(const BoxGrid& o) const {
    return dim_ == o.dim_ && lo_ == o.lo_ && hi_ == o.hi_ && nodes_ == o.nodes_;
  }

 private:
  void validate() const {
    for (int a = 0; a < dim_; ++a) {
      if (nodes_[a] < 1) throw std::invalid_argument("BoxGrid: need >= 1 interior node per axis");
      if (!(hi_[a] > lo_[a])) throw std::invalid_argument("BoxGrid: empty extent");
    }
  }

  int dim_;
  std::array<double, 2> lo_, hi_;
  std::array<int, 2> nodes_;
};

/// A domain as a sorted set of interior grid nodes.
class DomainMask {
 public:
  DomainMask(BoxGrid grid, std::vector<int> indices)
      : grid_(std::move(grid)), indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    if (indices_.empty()) throw std::invalid_argument("DomainMask: empty domain");
    if (indices_.front() < 0 || indices_.back() >= grid_.num_interior())
      throw std::invalid_argument("DomainMask: index outside interior nodes");
  }

  const BoxGrid& grid() const { return grid_; }
  const std::vector<int>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }
  double weight() const { return grid_.weight(); }

  bool contains(int linear) const {
    return std::binary_search(indices_.begin(), indices_.end(), linear);
  }

  /// Position of a grid node inside this mask's ordering, or -1.
  int local_index(int linear) const {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), linear);
    if (it == indices_.end() || *it != linear) return -1;
    return static_cast<int>(it - indices_.begin());
  }

  bool is_full_box() const { return size() == grid_.num_interior(); }

  bool is_subset_of(const DomainMask& super) const {
    if (!(grid_ == super.grid())) return false;
    return std::includes(super.indices().begin(), super.indices().end(),
                         indices_.begin(), indices_.end());
  }

  bool operator==(const DomainMask& o) const {
    return grid_ == o.grid_ && indices_ == o.indices_;
  }

  /// Number of 4-connected (2-connected in 1D) components. Metadata only;
  /// disconnected masks are admitted everywhere.
  int connected_components() const {
    std::vector<int> comp(indices_.size(), -1);
    int ncomp = 0;
    for (std::size_t start = 0; start < indices_.size(); ++start) {
      if (comp[start] >= 0) continue;
      std::vector<std::size_t> stack{start};
      comp[start] = ncomp;
      while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        for (int nb : neighbors(indices_[cur])) {
          const int loc = local_index(nb);
          if (loc >= 0 && comp[loc] < 0) {
            comp[loc] = ncomp;
            stack.push_back(static_cast<std::size_t>(loc));
          }
        }
      }
      ++ncomp;
    }
    return ncomp;
  }

  /// Grid neighbors of a node that stay inside the interior of the box.
  std::vector<int> neighbors(int linear) const {
    std::vector<int> out;
    const int ix = grid_.axis_index(linear, 0);
    if (ix > 0) out.push_back(linear - 1);
    if (ix + 1 < grid_.nodes(0)) out.push_back(linear + 1);
    if (grid_.dim() == 2) {
      const int iy = grid_.axis_index(linear, 1);
      if (iy > 0) out.push_back(linear - grid_.nodes(0));
      if (iy + 1 < grid_.nodes(1)) out.push_back(linear + grid_.nodes(0));
    }
    return out;
  }

 private:
  BoxGrid grid_;
  std::vector<int> indices_;
};

/// Select the interior nodes satisfying a coordinate predicate.
inline DomainMask build_mask(const BoxGrid& grid,
                             const std::function<bool(std::array<double, 2>)>& predicate) {
  std::vector<int> idx;
  for (int i = 0; i < grid.num_interior(); ++i)
    if (predicate(grid.node_coords(i))) idx.push_back(i);
  if (idx.empty()) throw std::invalid_argument("build_mask: empty domain (predicate selected no interior node)");
  return DomainMask(grid, std::move(idx));
}

inline DomainMask full_mask(const BoxGrid& grid) {
  std::vector<int> idx(grid.num_interior());
  for (int i = 0; i < grid.num_interior(); ++i) idx[i] = i;
  return DomainMask(grid, std::move(idx));
}

/// Zero-extension of a sub-mask vector onto a super-mask.
inline Vector extend_by_zero(const Vector& v, const DomainMask& sub, const DomainMask& super) {
  if (v.size() != static_cast<std::size_t>(sub.size()))
    throw std::invalid_argument("extend_by_zero: vector does not live on the sub-mask");
  if (!sub.is_subset_of(super))
    throw std::invalid_argument("extend_by_zero: masks are not nested");
  Vector out(super.size(), 0.0);
  for (int i = 0; i < sub.size(); ++i) {
    const int loc = super.local_index(sub.indices()[i]);
    out[static_cast<std::size_t>(loc)] = v[i];
  }
  return out;
}

/// Restriction of a super-mask vector to a sub-mask (adjoint of extend_by_zero).
inline Vector restrict_to(const Vector& v, const DomainMask& super, const DomainMask& sub) {
  if (v.size() != static_cast<std::size_t>(super.size()))
    throw std::invalid_argument("restrict_to: vector does not live on the super-mask");
  if (!sub.is_subset_of(super))
    throw std::invalid_argument("restrict_to: masks are not nested");
  Vector out(sub.size());
  for (int i = 0; i < sub.size(); ++i)
    out[i] = v[static_cast<std::size_t>(super.local_index(sub.indices()[i]))];
  return out;
}

/// Family of dilated domains shrinking onto a base mask.
struct NestedFamily {
  DomainMask base;
  DomainMask enclosing;
  std::vector<double> radii;             // strictly decreasing
  std::vector<DomainMask> members;       // one per radius, each contains base
  bool degenerate = false;               // all members collapsed onto base
};

inline double node_distance(const BoxGrid& g, int a, int b) {
  const auto ca = g.node_coords(a), cb = g.node_coords(b);
  const double dx = ca[0] - cb[0], dy = ca[1] - cb[1];
  return std::sqrt(dx * dx + dy * dy);
}

/// Dilations of `base` by Euclidean radii inside `enclosing`.
/// Radii must be strictly decreasing and positive.
inline NestedFamily make_shrinking_family(const DomainMask& base, const DomainMask& enclosing,
                                          const std::vector<double>& radii) {
  if (!base.is_subset_of(enclosing))
    throw std::invalid_argument("make_shrinking_family: base not contained in enclosing mask");
  if (radii.empty()) throw std::invalid_argument("make_shrinking_family: need at least one radius");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (radii[k] <= 0.0) throw std::invalid_argument("make_shrinking_family: radii must be positive");
    if (k > 0 && !(radii[k] < radii[k - 1]))
      throw std::invalid_argument("make_shrinking_family: radii must be strictly decreasing");
  }
  NestedFamily fam{base, enclosing, radii, {}, true};
  const BoxGrid& g = base.grid();
  for (double r : radii) {
    std::vector<int> idx;
    for (int node : enclosing.indices()) {
      double d = std::numeric_limits<double>::infinity();
      for (int b : base.indices()) {
        d = std::min(d, node_distance(g, node, b));
        if (d <= r) break;
      }
      if (d <= r) idx.push_back(node);
    }
    DomainMask member(g, std::move(idx));
    if (member.size() > base.size()) fam.degenerate = false;
    fam.members.push_back(std::move(member));
  }
  return fam;
}

// --- serialization -----------------------------------------------------------

inline nlohmann::json mask_to_json(const DomainMask& mask) {
  const BoxGrid& g = mask.grid();
  nlohmann::json j;
  j["dim"] = g.dim();
  j["extents"] = nlohmann::json::array();
  for (int a = 0; a < g.dim(); ++a) j["extents"].push_back({g.lo(a), g.hi(a)});
  j["nodes_per_axis"] = nlohmann::json::array();
  for (int a = 0; a < g.dim(); ++a) j["nodes_per_axis"].push_back(g.nodes(a));
  j["included_indices"] = mask.indices();  // ascending linear index
  return j;
}

inline DomainMask mask_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<int> idx = j.at("included_indices").get<std::vector<int>>();
  if (dim == 1) {
    BoxGrid g(j.at("extents")[0][0].get<double>(), j.at("extents")[0][1].get<double>(),
              j.at("nodes_per_axis")[0].get<int>());
    return DomainMask(g, std::move(idx));
  }
  BoxGrid g({j.at("extents")[0][0].get<double>(), j.at("extents")[1][0].get<double>()},
            {j.at("extents")[0][1].get<double>(), j.at("extents")[1][1].get<double>()},
            {j.at("nodes_per_axis")[0].get<int>(), j.at("nodes_per_axis")[1].get<int>()});
  return DomainMask(g, std::move(idx));
}

}  // namespace fracvi
