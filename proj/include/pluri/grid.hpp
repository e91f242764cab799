#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pluri/slope_geometry.hpp"

namespace pluri {

/// Uniform one-dimensional node set origin + step * i, i < count.
struct Axis {
  double origin = 0.0;
  double step = 1.0;
  int count = 1;

  double at(int i) const { return origin + step * i; }
  double last() const { return at(count - 1); }
  std::vector<double> nodes() const;
  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Box [-L, L]^n sampled with N nodes per axis.
class PrimalGrid {
 public:
  PrimalGrid(int dim, double half_width, int points);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points() const { return points_; }
  double spacing() const { return axis_.step; }
  const Axis& axis() const { return axis_; }
  std::size_t size() const { return dim_ == 1 ? points_ : std::size_t(points_) * points_; }
  /// Node coordinates; for n=2 the flat index is j * N + i with i along the first coordinate.
  Vec2 point(std::size_t flat) const;
  /// Same spacing, larger box: N' = (N - 1) * factor + 1.
  PrimalGrid widened(int factor) const;

  friend bool operator==(const PrimalGrid&, const PrimalGrid&) = default;

 private:
  int dim_;
  double half_width_;
  int points_;
  Axis axis_;
};

/// Axis-aligned lattice over the bounding box of a slope body with an inside mask.
class DualGrid {
 public:
  DualGrid(SlopeBody body, int points);
  /// Explicit axes, used for aligned Minkowski-sum grids.
  DualGrid(SlopeBody body, Axis first, Axis second);

  const SlopeBody& body() const { return body_; }
  int dim() const { return body_.dim(); }
  int points() const { return axes_[0].count; }
  const Axis& axis(int k) const { return axes_[k]; }
  std::size_t size() const { return dim() == 1 ? std::size_t(axes_[0].count) : std::size_t(axes_[0].count) * axes_[1].count; }
  Vec2 point(std::size_t flat) const;
  bool inside(std::size_t flat) const { return mask_[flat] != 0; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  /// Largest axis spacing.
  double spacing() const;
  /// Quadrature weights: each node's share of cell area clipped to the body.
  const std::vector<double>& weights() const { return weights_; }

  friend bool operator==(const DualGrid& a, const DualGrid& b) { return a.body_ == b.body_ && a.axes_[0] == b.axes_[0] && a.axes_[1] == b.axes_[1]; }

 private:
  void build();
  SlopeBody body_;
  Axis axes_[2];
  std::vector<std::uint8_t> mask_;
  std::vector<double> weights_;
};

/// Quadrature weights over the nodes flagged in `mask`: trapezoid cells with both ends
/// flagged (n=1), or cell areas clipped to the convex polygon `clip` and shared among the
/// flagged corners (n=2).
std::vector<double> cell_weights(const DualGrid& grid, const std::vector<std::uint8_t>& mask,
                                 std::span<const Vec2> clip);

/// Tolerances derived from grid resolution.
struct Tolerances {
  double lt;      ///< transform tolerance 2 h diam(P)
  double energy;  ///< 10 * lt
  double mass;    ///< 2 diam(P)^n / M
  double geo;     ///< 5 * lt
  double cvx;     ///< relative convexity slack

  static Tolerances from(const PrimalGrid& g, const DualGrid& d);
};

/// The primal/dual grid pair every potential of a class lives on.
struct Discretization {
  PrimalGrid primal;
  DualGrid dual;

  Tolerances tolerances() const { return Tolerances::from(primal, dual); }
  /// Default grids: L = 8, N = M = 513 for n = 1; L = 4, N = M = 129 for n = 2.
  static Discretization standard(const SlopeBody& body);
  static Discretization make(const SlopeBody& body, double half_width, int n_points, int m_points);
};

}  // namespace pluri
