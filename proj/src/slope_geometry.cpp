#include "pluri/slope_geometry.hpp"

#include <algorithm>
#include <cstdio>

namespace pluri {
namespace {

double snap(double v) {
  const double r = std::nearbyint(v / kSnap) * kSnap;
  return std::abs(r - v) <= kSnap ? (std::abs(r) < kSnap ? 0.0 : r) : v;
}

double orient(Vec2 o, Vec2 a, Vec2 b) { return cross(a - o, b - o); }

}  // namespace

std::vector<Vec2> convex_hull(std::vector<Vec2> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [tol](Vec2 a, Vec2 b) { return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  auto scale = [&](Vec2 o, Vec2 a, Vec2 b) { return tol * std::max({1.0, norm(a - o) * norm(b - o)}); };
  for (const Vec2& p : pts) {
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], p) <= scale(hull[k - 2], hull[k - 1], p)) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (k >= lower && orient(hull[k - 2], hull[k - 1], *it) <= scale(hull[k - 2], hull[k - 1], *it)) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(std::span<const Vec2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * twice;
}

std::vector<Vec2> clip_polygon(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  std::vector<Vec2> out(subject.begin(), subject.end());
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 b = clip[(e + 1) % clip.size()];
    std::vector<Vec2> in;
    in.swap(out);
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Vec2 cur = in[i];
      const Vec2 prev = in[(i + in.size() - 1) % in.size()];
      const double dc = orient(a, b, cur);
      const double dp = orient(a, b, prev);
      if (dc >= 0) {
        if (dp < 0) out.push_back(prev + (dp / (dp - dc)) * (cur - prev));
        out.push_back(cur);
      } else if (dp >= 0) {
        out.push_back(prev + (dp / (dp - dc)) * (cur - prev));
      }
    }
  }
  return out;
}

bool polygon_contains(std::span<const Vec2> poly, Vec2 p, double tol) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const double len = norm(b - a);
    if (orient(a, b, p) < -tol * len) return false;
  }
  return true;
}

SlopeBody SlopeBody::interval(double lo, double hi) {
  lo = snap(lo);
  hi = snap(hi);
  if (!(hi - lo > kSnap)) throw GeometryError("interval slope body needs lo < hi");
  SlopeBody b;
  b.dim_ = 1;
  b.lo_ = lo;
  b.hi_ = hi;
  return b;
}

SlopeBody SlopeBody::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw GeometryError("polygon slope body needs at least three vertices");
  for (Vec2& v : vertices) v = {snap(v.x), snap(v.y)};
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices[i];
    const Vec2 b = vertices[(i + 1) % n];
    const Vec2 c = vertices[(i + 2) % n];
    if (orient(a, b, c) <= kSnap * std::max(1.0, norm(b - a) * norm(c - b)))
      throw GeometryError("polygon vertices must be strictly convex and counterclockwise");
  }
  // A strictly left-turning cycle can still wind twice; the area check rules that out.
  const double area = polygon_area(vertices);
  const std::vector<Vec2> hull = convex_hull(vertices);
  if (hull.size() != n || std::abs(polygon_area(hull) - area) > 1e-9 * std::max(1.0, area))
    throw GeometryError("polygon vertices do not describe a simple convex polygon");
  SlopeBody b;
  b.dim_ = 2;
  b.vertices_ = std::move(vertices);
  return b;
}

SlopeBody SlopeBody::hull_of(std::vector<Vec2> points) {
  for (Vec2& v : points) v = {snap(v.x), snap(v.y)};
  std::vector<Vec2> hull = convex_hull(std::move(points));
  if (hull.size() < 3 || polygon_area(hull) <= kSnap) throw GeometryError("point set has empty interior");
  // Start at the lowest-then-leftmost vertex so equal bodies compare equal.
  auto first = std::min_element(hull.begin(), hull.end(),
                                [](Vec2 a, Vec2 b) { return a.y < b.y || (a.y == b.y && a.x < b.x); });
  std::rotate(hull.begin(), first, hull.end());
  return polygon(std::move(hull));
}

double SlopeBody::volume() const { return dim_ == 1 ? hi_ - lo_ : polygon_area(vertices_); }

double SlopeBody::diameter() const {
  if (dim_ == 1) return hi_ - lo_;
  double d = 0.0;
  for (const Vec2& a : vertices_)
    for (const Vec2& b : vertices_) d = std::max(d, norm(a - b));
  return d;
}

std::pair<Vec2, Vec2> SlopeBody::bounds() const {
  if (dim_ == 1) return {{lo_, 0.0}, {hi_, 0.0}};
  Vec2 mn{kInf, kInf};
  Vec2 mx{-kInf, -kInf};
  for (const Vec2& v : vertices_) {
    mn = {std::min(mn.x, v.x), std::min(mn.y, v.y)};
    mx = {std::max(mx.x, v.x), std::max(mx.y, v.y)};
  }
  return {mn, mx};
}

double SlopeBody::support(Vec2 d) const {
  if (dim_ == 1) return std::max(lo_ * d.x, hi_ * d.x);
  double s = -kInf;
  for (const Vec2& v : vertices_) s = std::max(s, dot(v, d));
  return s;
}

bool SlopeBody::contains(Vec2 p, double tol) const {
  if (dim_ == 1) return p.x >= lo_ - tol && p.x <= hi_ + tol;
  return polygon_contains(vertices_, p, tol);
}

Vec2 SlopeBody::vertex_direction(std::size_t index) const {
  if (dim_ != 2) throw GeometryError("vertex directions are defined for polygons only");
  if (index >= vertices_.size()) throw GeometryError("vertex index out of range");
  const std::size_t n = vertices_.size();
  auto outward = [&](std::size_t i) {
    const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
    const double len = norm(e);
    return Vec2{e.y / len, -e.x / len};
  };
  return outward(index) + outward((index + n - 1) % n);
}

std::string SlopeBody::id() const {
  std::string s;
  char buf[64];
  if (dim_ == 1) {
    std::snprintf(buf, sizeof buf, "I[%.17g,%.17g]", lo_, hi_);
    return buf;
  }
  s = "G[";
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s(%.17g,%.17g)", i ? ";" : "", vertices_[i].x, vertices_[i].y);
    s += buf;
  }
  return s + "]";
}

SlopeBody minkowski_sum(const SlopeBody& a, const SlopeBody& b) {
  if (a.dim() != b.dim()) throw GeometryError("minkowski_sum: dimension mismatch");
  if (a.dim() == 1) return SlopeBody::interval(a.lo() + b.lo(), a.hi() + b.hi());
  std::vector<Vec2> sums;
  sums.reserve(a.vertices().size() * b.vertices().size());
  for (const Vec2& p : a.vertices())
    for (const Vec2& q : b.vertices()) sums.push_back(p + q);
  return SlopeBody::hull_of(std::move(sums));
}

double mixed_volume(const SlopeBody& a, const SlopeBody& b) {
  if (a.dim() != 2 || b.dim() != 2) throw GeometryError("mixed_volume is defined for n=2 only");
  return 0.5 * (minkowski_sum(a, b).volume() - a.volume() - b.volume());
}

}  // namespace pluri
