#include "pluri/potential.hpp"

#include <algorithm>
#include <cmath>

#include "pluri/transforms.hpp"

namespace pluri {
namespace {

double segment_distance(Vec2 a, Vec2 b, Vec2 p) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  const double t = len2 > 0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * d));
}

}  // namespace

SlopeWindow SlopeWindow::interval(double lo, double hi) { return {1, lo, hi, {}}; }

SlopeWindow SlopeWindow::hull_of(std::vector<Vec2> points) {
  SlopeWindow w{2, 0.0, 0.0, convex_hull(std::move(points), 1e-12)};
  return w;
}

SlopeWindow SlopeWindow::of(const SlopeBody& body) {
  return body.dim() == 1 ? interval(body.lo(), body.hi()) : SlopeWindow{2, 0.0, 0.0, body.vertices()};
}

bool SlopeWindow::contains(Vec2 p, double tol) const {
  if (dim == 1) return p.x >= lo - tol && p.x <= hi + tol;
  switch (polygon.size()) {
    case 0: return false;
    case 1: return norm(p - polygon[0]) <= tol;
    case 2: return segment_distance(polygon[0], polygon[1], p) <= tol;
    default: return polygon_contains(polygon, p, tol);
  }
}

double SlopeWindow::measure() const {
  if (dim == 1) return std::max(0.0, hi - lo);
  return polygon.size() < 3 ? 0.0 : polygon_area(polygon);
}

SlopeWindow intersect(const SlopeWindow& a, const SlopeWindow& b) {
  if (a.dim == 1) return SlopeWindow::interval(std::max(a.lo, b.lo), std::min(a.hi, b.hi));
  if (a.polygon.size() >= 3 && b.polygon.size() >= 3)
    return SlopeWindow::hull_of(clip_polygon(a.polygon, b.polygon));
  const SlopeWindow& small = a.polygon.size() < 3 ? a : b;
  const SlopeWindow& other = a.polygon.size() < 3 ? b : a;
  std::vector<Vec2> kept;
  for (Vec2 p : small.polygon)
    if (other.contains(p, 1e-9)) kept.push_back(p);
  return SlopeWindow::hull_of(std::move(kept));
}

SlopeWindow hull_union(const SlopeWindow& a, const SlopeWindow& b) {
  if (a.dim == 1) return SlopeWindow::interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
  std::vector<Vec2> pts = a.polygon;
  pts.insert(pts.end(), b.polygon.begin(), b.polygon.end());
  return SlopeWindow::hull_of(std::move(pts));
}

SlopeWindow minkowski_sum(const SlopeWindow& a, const SlopeWindow& b) {
  if (a.dim == 1) return SlopeWindow::interval(a.lo + b.lo, a.hi + b.hi);
  std::vector<Vec2> pts;
  for (Vec2 p : a.polygon)
    for (Vec2 q : b.polygon) pts.push_back(p + q);
  return SlopeWindow::hull_of(std::move(pts));
}

std::size_t DualPotential::finite_count() const {
  return std::size_t(std::count_if(values.begin(), values.end(), [](double v) { return v != kInf; }));
}

bool DualPotential::in_closure(std::size_t k) const {
  return finite(k) || std::find(poles.begin(), poles.end(), k) != poles.end();
}

SlopeWindow finite_window(const DualPotential& w) {
  if (w.grid.dim() == 1) {
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t k = 0; k < w.values.size(); ++k) {
      if (!w.in_closure(k)) continue;
      lo = std::min(lo, w.grid.point(k).x);
      hi = std::max(hi, w.grid.point(k).x);
    }
    return SlopeWindow::interval(lo, hi);
  }
  std::vector<Vec2> pts;
  for (std::size_t k = 0; k < w.values.size(); ++k)
    if (w.in_closure(k)) pts.push_back(w.grid.point(k));
  return SlopeWindow::hull_of(std::move(pts));
}

double sup_distance(const PrimalPotential& a, const PrimalPotential& b) {
  if (a.values.size() != b.values.size()) throw std::invalid_argument("sup_distance: grid mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

Potential Potential::from_dual(DualPotential w, const PrimalGrid& grid, std::string label) {
  if (w.grid.dim() != grid.dim()) throw std::invalid_argument("from_dual: dimension mismatch");
  PrimalPotential u = legendre_to_primal(w, grid);
  return Potential(std::move(u), std::move(w), ExactSide::dual, std::move(label));
}

Potential Potential::from_primal(PrimalPotential u, const DualGrid& grid, std::string label) {
  if (u.grid.dim() != grid.dim()) throw std::invalid_argument("from_primal: dimension mismatch");
  DualPotential w = legendre_to_dual(u, grid);
  if (w.finite_count() == 0) throw EmptyClassError();
  return Potential(std::move(u), std::move(w), ExactSide::primal, std::move(label));
}

Potential Potential::with_label(std::string label) const {
  Potential p = *this;
  p.label_ = std::move(label);
  return p;
}

Potential Potential::with_tail(std::shared_ptr<const TailModel> tail) const {
  Potential p = *this;
  p.tail_ = std::move(tail);
  return p;
}

Potential Potential::shifted(double c) const {
  Potential p = *this;
  for (double& v : p.primal_.values) v += c;
  for (double& v : p.dual_.values)
    if (v != kInf) v -= c;
  if (tail_) {
    auto base = tail_;
    p.tail_ = std::make_shared<const TailModel>(
        TailModel{[base, c](double x) { return base->value(x) + c; }, base->slope, base->curvature});
  }
  return p;
}

double Potential::value_at(Vec2 x) const {
  const bool use_primal = dim() == 1 && side_ == ExactSide::primal;
  if (use_primal) {
    const Axis& ax = primal_.grid.axis();
    const auto& u = primal_.values;
    const int n = ax.count;
    if (x.x <= ax.origin) return u[0] + window().lo * (x.x - ax.origin);
    if (x.x >= ax.last()) return u[n - 1] + window().hi * (x.x - ax.last());
    const double s = (x.x - ax.origin) / ax.step;
    const int i = std::min(n - 2, int(s));
    const double t = s - i;
    return (1.0 - t) * u[i] + t * u[i + 1];
  }
  double best = -kInf;
  for (std::size_t k = 0; k < dual_.values.size(); ++k) {
    if (!dual_.finite(k)) continue;
    best = std::max(best, dot(dual_.grid.point(k), x) - dual_.values[k]);
  }
  return best;
}

Potential Potential::on_grid(const PrimalGrid& grid) const {
  if (side_ == ExactSide::dual) {
    Potential p = from_dual(dual_, grid, label_);
    p.tail_ = tail_;
    return p;
  }
  PrimalPotential u{grid, std::vector<double>(grid.size()), primal_.window, true};
  for (std::size_t i = 0; i < grid.size(); ++i) u.values[i] = value_at(grid.point(i));
  Potential p = from_primal(std::move(u), dual_.grid, label_);
  p.tail_ = tail_;
  return p;
}

}  // namespace pluri
