#include "pluri/grid.hpp"

#include <algorithm>
#include <cmath>

namespace pluri {

std::vector<double> Axis::nodes() const {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = at(i);
  return out;
}

PrimalGrid::PrimalGrid(int dim, double half_width, int points)
    : dim_(dim), half_width_(half_width), points_(points) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("primal grid dimension must be 1 or 2");
  if (!(half_width > 0)) throw std::invalid_argument("primal grid half-width must be positive");
  if (points < 16) throw std::invalid_argument("primal grid needs N >= 16");
  axis_ = {-half_width, 2.0 * half_width / (points - 1), points};
}

Vec2 PrimalGrid::point(std::size_t flat) const {
  if (dim_ == 1) return {axis_.at(int(flat)), 0.0};
  return {axis_.at(int(flat % points_)), axis_.at(int(flat / points_))};
}

PrimalGrid PrimalGrid::widened(int factor) const {
  return PrimalGrid(dim_, half_width_ * factor, (points_ - 1) * factor + 1);
}

DualGrid::DualGrid(SlopeBody body, int points) : body_(std::move(body)) {
  if (points < 16) throw std::invalid_argument("dual grid needs M >= 16");
  const auto [mn, mx] = body_.bounds();
  axes_[0] = {mn.x, (mx.x - mn.x) / (points - 1), points};
  axes_[1] = body_.dim() == 2 ? Axis{mn.y, (mx.y - mn.y) / (points - 1), points} : Axis{0.0, 1.0, 1};
  build();
}

DualGrid::DualGrid(SlopeBody body, Axis first, Axis second) : body_(std::move(body)) {
  axes_[0] = first;
  axes_[1] = body_.dim() == 2 ? second : Axis{0.0, 1.0, 1};
  build();
}

Vec2 DualGrid::point(std::size_t flat) const {
  if (dim() == 1) return {axes_[0].at(int(flat)), 0.0};
  const int n0 = axes_[0].count;
  return {axes_[0].at(int(flat % n0)), axes_[1].at(int(flat / n0))};
}

double DualGrid::spacing() const { return dim() == 1 ? axes_[0].step : std::max(axes_[0].step, axes_[1].step); }

void DualGrid::build() {
  const std::size_t n = size();
  mask_.assign(n, 0);
  weights_.assign(n, 0.0);
  const double tol = 1e-9 * std::max(1.0, body_.diameter());
  for (std::size_t k = 0; k < n; ++k) mask_[k] = body_.contains(point(k), tol) ? 1 : 0;
  if (std::count(mask_.begin(), mask_.end(), 1) < 2) throw std::invalid_argument("dual grid has no interior nodes");

  if (dim() == 1) {
    weights_ = cell_weights(*this, mask_, {});
  } else {
    weights_ = cell_weights(*this, mask_, body_.vertices());
  }
}

std::vector<double> cell_weights(const DualGrid& g, const std::vector<std::uint8_t>& mask,
                                 std::span<const Vec2> clip) {
  std::vector<double> w(g.size(), 0.0);
  if (g.dim() == 1) {
    const double step = g.axis(0).step;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
      if (!mask[k] || !mask[k + 1]) continue;
      w[k] += 0.5 * step;
      w[k + 1] += 0.5 * step;
    }
    return w;
  }
  if (clip.size() < 3) return w;
  const int n0 = g.axis(0).count;
  const int n1 = g.axis(1).count;
  const double full = g.axis(0).step * g.axis(1).step;
  for (int j = 0; j + 1 < n1; ++j) {
    for (int i = 0; i + 1 < n0; ++i) {
      const std::size_t corners[4] = {std::size_t(j) * n0 + i, std::size_t(j) * n0 + i + 1,
                                      std::size_t(j + 1) * n0 + i + 1, std::size_t(j + 1) * n0 + i};
      int inside = 0;
      for (std::size_t c : corners) inside += mask[c];
      if (inside == 0) continue;
      double area = full;
      if (inside < 4 || !polygon_contains(clip, g.point(corners[0]), 0) || !polygon_contains(clip, g.point(corners[2]), 0)) {
        const Vec2 cell[4] = {g.point(corners[0]), g.point(corners[1]), g.point(corners[2]), g.point(corners[3])};
        area = std::max(0.0, polygon_area(clip_polygon(cell, clip)));
      }
      for (std::size_t c : corners)
        if (mask[c]) w[c] += area / inside;
    }
  }
  return w;
}

Tolerances Tolerances::from(const PrimalGrid& g, const DualGrid& d) {
  const double diam = d.body().diameter();
  const double lt = 2.0 * g.spacing() * diam;
  return {lt, 10.0 * lt, 2.0 * std::pow(diam, d.dim()) / d.points(), 5.0 * lt, 1e-9};
}

Discretization Discretization::standard(const SlopeBody& body) {
  return body.dim() == 1 ? make(body, 8.0, 513, 513) : make(body, 4.0, 129, 129);
}

Discretization Discretization::make(const SlopeBody& body, double half_width, int n_points, int m_points) {
  return {PrimalGrid(body.dim(), half_width, n_points), DualGrid(body, m_points)};
}

}  // namespace pluri
