/// @file grid.hpp
/// @brief Tensor-product grids for the interval, the rectangle and the
///        disc (a masked square with cut-cell quadrature weights).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pqfrac/error.hpp"

namespace pqfrac {

using Vec2 = std::array<double, 2>;

enum class DomainKind { Interval, Rectangle, Disc };
enum class NodeKind : std::uint8_t { Interior, Boundary, Exterior };

inline std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Interval: return "interval";
    case DomainKind::Rectangle: return "rectangle";
    default: return "disc";
  }
}

/// Immutable node set with classification, quadrature weights, boundary
/// arc-length weights and outward unit normals.
class Grid {
 public:
  static std::shared_ptr<const Grid> interval(double length, int n) {
    check_extent(length);
    auto g = std::shared_ptr<Grid>(new Grid());
    g->kind_ = DomainKind::Interval;
    g->dim_ = 1;
    g->n_ = {n, 1};
    g->extent_ = {length, 0.0};
    g->origin_ = {0.0, 0.0};
    g->h_ = {length / (n - 1), 0.0};
    g->build_box();
    return g;
  }

  static std::shared_ptr<const Grid> rectangle(double lx, double ly, int nx, int ny) {
    check_extent(lx);
    check_extent(ly);
    auto g = std::shared_ptr<Grid>(new Grid());
    g->kind_ = DomainKind::Rectangle;
    g->dim_ = 2;
    g->n_ = {nx, ny};
    g->extent_ = {lx, ly};
    g->origin_ = {0.0, 0.0};
    g->h_ = {lx / (nx - 1), ly / (ny - 1)};
    g->build_box();
    return g;
  }

  /// Disc of the given radius centred at the origin, embedded in the
  /// square [-R,R]^2 with n nodes per axis.
  static std::shared_ptr<const Grid> disc(double radius, int n) {
    check_extent(radius);
    auto g = std::shared_ptr<Grid>(new Grid());
    g->kind_ = DomainKind::Disc;
    g->dim_ = 2;
    g->n_ = {n, n};
    g->radius_ = radius;
    g->extent_ = {2 * radius, 2 * radius};
    g->origin_ = {-radius, -radius};
    g->h_ = {2 * radius / (n - 1), 2 * radius / (n - 1)};
    g->build_disc();
    return g;
  }

  DomainKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  int n(int axis = 0) const noexcept { return n_[axis]; }
  double h(int axis = 0) const noexcept { return h_[axis]; }
  double extent(int axis = 0) const noexcept { return extent_[axis]; }
  double radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return kind_node_.size(); }

  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(j);
  }
  int ix(std::size_t k) const noexcept { return static_cast<int>(k % static_cast<std::size_t>(n_[0])); }
  int iy(std::size_t k) const noexcept { return static_cast<int>(k / static_cast<std::size_t>(n_[0])); }

  Vec2 coord(std::size_t k) const noexcept {
    return {origin_[0] + ix(k) * h_[0], dim_ == 2 ? origin_[1] + iy(k) * h_[1] : 0.0};
  }

  NodeKind node_kind(std::size_t k) const noexcept { return kind_node_[k]; }
  bool active(std::size_t k) const noexcept { return kind_node_[k] != NodeKind::Exterior; }
  bool on_boundary(std::size_t k) const noexcept { return kind_node_[k] == NodeKind::Boundary; }
  bool is_corner(std::size_t k) const noexcept { return corner_[k] != 0; }

  /// Quadrature weight of node k (zero on exterior nodes).
  double weight(std::size_t k) const noexcept { return weight_[k]; }
  /// Weight of node k in the boundary integral (zero off the boundary).
  double boundary_weight(std::size_t k) const noexcept { return bweight_[k]; }
  Vec2 normal(std::size_t k) const noexcept { return normal_[k]; }

  const std::vector<std::size_t>& boundary_nodes() const noexcept { return boundary_; }

  /// Neighbour of node k shifted by (di, dj) lattice steps, or -1 when it
  /// leaves the node box or lands on an exterior node.
  long neighbor(std::size_t k, int di, int dj = 0) const noexcept {
    const int i = ix(k) + di;
    const int j = iy(k) + dj;
    if (i < 0 || i >= n_[0] || j < 0 || j >= n_[1]) return -1;
    const std::size_t m = index(i, j);
    return active(m) ? static_cast<long>(m) : -1;
  }

  /// Distance from a point to the boundary of the continuous domain.
  double dist_to_boundary(const Vec2& x) const noexcept {
    switch (kind_) {
      case DomainKind::Interval: return std::min(x[0] - origin_[0], origin_[0] + extent_[0] - x[0]);
      case DomainKind::Rectangle:
        return std::min({x[0] - origin_[0], origin_[0] + extent_[0] - x[0], x[1] - origin_[1],
                         origin_[1] + extent_[1] - x[1]});
      default: return radius_ - std::hypot(x[0], x[1]);
    }
  }

  double measure() const noexcept {
    switch (kind_) {
      case DomainKind::Interval: return extent_[0];
      case DomainKind::Rectangle: return extent_[0] * extent_[1];
      default: return std::numbers::pi * radius_ * radius_;
    }
  }

  double diameter() const noexcept {
    switch (kind_) {
      case DomainKind::Interval: return extent_[0];
      case DomainKind::Rectangle: return std::hypot(extent_[0], extent_[1]);
      default: return 2 * radius_;
    }
  }

  /// Largest distance from a point of the domain to its boundary.
  double inradius() const noexcept {
    switch (kind_) {
      case DomainKind::Interval: return extent_[0] / 2;
      case DomainKind::Rectangle: return std::min(extent_[0], extent_[1]) / 2;
      default: return radius_;
    }
  }

  /// Smallest mesh width over the axes.
  double hmin() const noexcept { return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]); }

 private:
  Grid() = default;

  static void check_extent(double e) {
    if (!(e > 0.0) || !std::isfinite(e)) throw DegenerateGrid("domain extent must be positive");
  }

  void check_counts() const {
    for (int a = 0; a < dim_; ++a)
      if (n_[a] < 4) throw DegenerateGrid("at least 4 nodes per axis are required");
  }

  void allocate() {
    const std::size_t total = static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
    kind_node_.assign(total, NodeKind::Interior);
    weight_.assign(total, 0.0);
    bweight_.assign(total, 0.0);
    normal_.assign(total, Vec2{0.0, 0.0});
    corner_.assign(total, 0);
  }

  void build_box() {
    check_counts();
    allocate();
    if (dim_ == 1) {
      const int n = n_[0];
      for (int i = 0; i < n; ++i) weight_[index(i)] = h_[0] * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
      for (int i : {0, n - 1}) {
        const std::size_t k = index(i);
        kind_node_[k] = NodeKind::Boundary;
        bweight_[k] = 1.0;
        normal_[k] = {i == 0 ? -1.0 : 1.0, 0.0};
        boundary_.push_back(k);
      }
      return;
    }
    const int nx = n_[0], ny = n_[1];
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = index(i, j);
        const double cx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        const double cy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
        weight_[k] = h_[0] * h_[1] * cx * cy;
        const bool xb = (i == 0 || i == nx - 1);
        const bool yb = (j == 0 || j == ny - 1);
        if (!xb && !yb) continue;
        kind_node_[k] = NodeKind::Boundary;
        boundary_.push_back(k);
        Vec2 nu{0.0, 0.0};
        if (i == 0) nu[0] = -1.0;
        if (i == nx - 1) nu[0] = 1.0;
        if (j == 0) nu[1] = -1.0;
        if (j == ny - 1) nu[1] = 1.0;
        if (xb && yb) {
          corner_[k] = 1;
          nu = {nu[0] / std::numbers::sqrt2, nu[1] / std::numbers::sqrt2};
          bweight_[k] = 0.5 * (h_[0] + h_[1]);
        } else {
          bweight_[k] = xb ? h_[1] : h_[0];
        }
        normal_[k] = nu;
      }
    }
  }

  // Area of [x0,x1]x[y0,y1] intersected with the disc of radius R.
  double clipped_area(double x0, double x1, double y0, double y1) const {
    const double R = radius_;
    const double a = std::max(x0, -R), b = std::min(x1, R);
    if (a >= b) return 0.0;
    auto chord = [&](double x) {
      const double c = std::sqrt(std::max(0.0, R * R - x * x));
      return std::max(0.0, std::min(y1, c) - std::max(y0, -c));
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(chord, a, b, 12, 1e-13);
  }

  void build_disc() {
    check_counts();
    allocate();
    const int n = n_[0];
    const double R2 = radius_ * radius_ * (1.0 + 1e-12);
    auto inside = [&](int i, int j) {
      if (i < 0 || i >= n || j < 0 || j >= n) return false;
      const Vec2 x = coord(index(i, j));
      return x[0] * x[0] + x[1] * x[1] <= R2;
    };
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t k = index(i, j);
        if (!inside(i, j)) {
          kind_node_[k] = NodeKind::Exterior;
        } else if (!inside(i - 1, j) || !inside(i + 1, j) || !inside(i, j - 1) || !inside(i, j + 1)) {
          kind_node_[k] = NodeKind::Boundary;
        }
      }
    }
    // Cut-cell quadrature: each cell's clipped area is shared equally by its
    // non-exterior corners.
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i + 1 < n; ++i) {
        const Vec2 lo = coord(index(i, j));
        const double area = clipped_area(lo[0], lo[0] + h_[0], lo[1], lo[1] + h_[1]);
        if (area <= 0.0) continue;
        std::array<std::size_t, 4> corners{index(i, j), index(i + 1, j), index(i, j + 1), index(i + 1, j + 1)};
        int live = 0;
        for (auto c : corners) live += active(c) ? 1 : 0;
        if (live == 0) continue;
        for (auto c : corners)
          if (active(c)) weight_[c] += area / live;
      }
    }
    std::vector<std::pair<double, std::size_t>> ring;
    for (std::size_t k = 0; k < size(); ++k) {
      if (kind_node_[k] != NodeKind::Boundary) continue;
      const Vec2 x = coord(k);
      const double r = std::hypot(x[0], x[1]);
      normal_[k] = r > 0 ? Vec2{x[0] / r, x[1] / r} : Vec2{1.0, 0.0};
      ring.emplace_back(std::atan2(x[1], x[0]), k);
    }
    std::sort(ring.begin(), ring.end());
    const std::size_t m = ring.size();
    for (std::size_t a = 0; a < m; ++a) {
      double prev = ring[(a + m - 1) % m].first;
      double next = ring[(a + 1) % m].first;
      const double here = ring[a].first;
      if (prev > here) prev -= 2 * std::numbers::pi;
      if (next < here) next += 2 * std::numbers::pi;
      if (m == 1) {
        prev = here - std::numbers::pi;
        next = here + std::numbers::pi;
      }
      bweight_[ring[a].second] = radius_ * 0.5 * (next - prev);
    }
    for (const auto& [theta, k] : ring) boundary_.push_back(k);
    std::sort(boundary_.begin(), boundary_.end());
  }

  DomainKind kind_ = DomainKind::Interval;
  int dim_ = 1;
  std::array<int, 2> n_{1, 1};
  Vec2 extent_{0.0, 0.0};
  Vec2 origin_{0.0, 0.0};
  Vec2 h_{0.0, 0.0};
  double radius_ = 0.0;
  std::vector<NodeKind> kind_node_;
  std::vector<double> weight_;
  std::vector<double> bweight_;
  std::vector<Vec2> normal_;
  std::vector<std::uint8_t> corner_;
  std::vector<std::size_t> boundary_;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace pqfrac
