#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pluri {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Snap tolerance applied to polygon vertices and collinearity tests.
inline constexpr double kSnap = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Counterclockwise convex hull with collinear points removed.
std::vector<Vec2> convex_hull(std::vector<Vec2> points, double tol = kSnap);

/// Signed shoelace area (positive for counterclockwise input).
double polygon_area(std::span<const Vec2> poly);

/// Sutherland-Hodgman clip of an arbitrary polygon against a convex ccw polygon.
std::vector<Vec2> clip_polygon(std::span<const Vec2> subject, std::span<const Vec2> convex_clip);

bool polygon_contains(std::span<const Vec2> ccw_poly, Vec2 p, double tol);

/// A compact convex polytope in dimension 1 (interval) or 2 (polygon).
class SlopeBody {
 public:
  static SlopeBody interval(double lo, double hi);
  /// Vertices must form a strictly convex counterclockwise cycle.
  static SlopeBody polygon(std::vector<Vec2> vertices);
  /// Convex hull of arbitrary points; rejects degenerate hulls.
  static SlopeBody hull_of(std::vector<Vec2> points);

  static SlopeBody unit_square() { return polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }
  static SlopeBody unit_triangle() { return polygon({{0, 0}, {1, 0}, {0, 1}}); }

  int dim() const { return dim_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }

  double volume() const;
  double diameter() const;
  /// Axis-aligned bounding box as (min corner, max corner); n=1 uses x only.
  std::pair<Vec2, Vec2> bounds() const;
  double support(Vec2 direction) const;
  bool contains(Vec2 p, double tol = kSnap) const;
  /// Outward unit normals of the edges meeting at vertex `index` (n=2), summed.
  Vec2 vertex_direction(std::size_t index) const;

  /// Compact textual identity used in binary headers and reports.
  std::string id() const;

  friend bool operator==(const SlopeBody&, const SlopeBody&) = default;

 private:
  SlopeBody() = default;
  int dim_ = 1;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<Vec2> vertices_;
};

SlopeBody minkowski_sum(const SlopeBody& a, const SlopeBody& b);

/// Mixed area V(a,b) by polarization of the Minkowski-sum area (n=2 only).
double mixed_volume(const SlopeBody& a, const SlopeBody& b);

}  // namespace pluri
