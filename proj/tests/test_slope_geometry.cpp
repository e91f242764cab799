#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "pluri/slope_geometry.hpp"
#include "support.hpp"

using namespace pluri;

namespace {

double brute_support(const std::vector<Vec2>& pts, Vec2 d) {
  double h = -kInf;
  for (Vec2 p : pts) h = std::max(h, dot(p, d));
  return h;
}

Vec2 direction(int k, int count) {
  const double th = 2 * std::numbers::pi * (k + 0.37) / count;
  return {std::cos(th), std::sin(th)};
}

}  // namespace

TEST_CASE("hull contains every input point and uses only input vertices") {
  for (int trial = 0; trial < gen::kCases; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial);
    const auto pts = gen::points(rng, gen::integer(rng, 3, 40), -2, 2);
    const auto hull = convex_hull(pts);
    if (hull.size() < 3) continue;
    CHECK(polygon_area(hull) > 0);
    for (Vec2 p : pts) CHECK(polygon_contains(hull, p, 1e-9));
    for (Vec2 v : hull) CHECK(std::find(pts.begin(), pts.end(), v) != pts.end());
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Vec2 a = hull[i], b = hull[(i + 1) % hull.size()], c = hull[(i + 2) % hull.size()];
      CHECK(cross(b - a, c - b) > 0);
    }
  }
}

TEST_CASE("hull drops collinear points") {
  const auto hull = convex_hull({{0, 0}, {1, 0}, {2, 0}, {2, 2}, {1, 1}, {0, 2}});
  CHECK(hull.size() == 4);
  CHECK(polygon_area(hull) == doctest::Approx(4.0));
}

TEST_CASE("polygon area matches a Monte Carlo estimate") {
  for (int trial = 0; trial < 20; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 1);
    const SlopeBody body = gen::polygon(rng);
    const auto& v = body.vertices();
    int hits = 0;
    constexpr int samples = 40000;
    for (int s = 0; s < samples; ++s) {
      const Vec2 q{gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1)};
      bool in = true;
      for (std::size_t i = 0; i < v.size() && in; ++i) in = cross(v[(i + 1) % v.size()] - v[i], q - v[i]) >= 0;
      hits += in;
    }
    CHECK(body.volume() == doctest::Approx(4.0 * hits / samples).epsilon(0.05));
  }
}

TEST_CASE("support and diameter agree with brute force over vertices") {
  for (int trial = 0; trial < gen::kCases; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 2);
    const SlopeBody body = gen::polygon(rng);
    const auto& v = body.vertices();
    for (int k = 0; k < 16; ++k) CHECK(body.support(direction(k, 16)) == doctest::Approx(brute_support(v, direction(k, 16))));
    double diam = 0;
    for (Vec2 a : v)
      for (Vec2 b : v) diam = std::max(diam, norm(a - b));
    CHECK(body.diameter() == doctest::Approx(diam));
  }
}

TEST_CASE("Minkowski sum support is the sum of supports") {
  for (int trial = 0; trial < gen::kCases; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 3);
    const SlopeBody a = gen::polygon(rng);
    const SlopeBody b = gen::polygon(rng);
    const SlopeBody s = minkowski_sum(a, b);
    for (int k = 0; k < 32; ++k) {
      const Vec2 d = direction(k, 32);
      CHECK(brute_support(s.vertices(), d) ==
            doctest::Approx(brute_support(a.vertices(), d) + brute_support(b.vertices(), d)));
    }
  }
}

TEST_CASE("Minkowski sum of intervals") {
  const SlopeBody s = minkowski_sum(SlopeBody::interval(0, 1), SlopeBody::interval(-0.5, 2));
  CHECK(s.dim() == 1);
  CHECK(s.lo() == -0.5);
  CHECK(s.hi() == 3.0);
  CHECK(s.volume() == 3.5);
}

TEST_CASE("mixed volume identities") {
  CHECK(mixed_volume(SlopeBody::unit_square(), SlopeBody::unit_triangle()) == doctest::Approx(1.0));
  for (int trial = 0; trial < gen::kCases; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 4);
    const SlopeBody a = gen::polygon(rng);
    const SlopeBody b = gen::polygon(rng);
    CHECK(mixed_volume(a, a) == doctest::Approx(a.volume()));
    CHECK(mixed_volume(a, b) == doctest::Approx(mixed_volume(b, a)));
    // Minkowski's inequality for mixed areas.
    CHECK(mixed_volume(a, b) * mixed_volume(a, b) >= a.volume() * b.volume() * (1 - 1e-9));
    const double t = gen::uniform(rng, 0.5, 3);
    std::vector<Vec2> scaled;
    for (Vec2 v : a.vertices()) scaled.push_back(t * v);
    CHECK(mixed_volume(a, SlopeBody::polygon(scaled)) == doctest::Approx(t * a.volume()));
  }
}

TEST_CASE("clipping a polygon against itself and a half-size square") {
  for (int trial = 0; trial < gen::kCases; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 5);
    const SlopeBody a = gen::polygon(rng);
    const SlopeBody b = gen::polygon(rng);
    CHECK(std::abs(polygon_area(clip_polygon(a.vertices(), a.vertices()))) == doctest::Approx(a.volume()));
    const double both = std::abs(polygon_area(clip_polygon(a.vertices(), b.vertices())));
    CHECK(both <= std::min(a.volume(), b.volume()) + 1e-12);
    CHECK(both == doctest::Approx(std::abs(polygon_area(clip_polygon(b.vertices(), a.vertices())))));
  }
}

TEST_CASE("body construction rejects bad input") {
  CHECK_THROWS_AS(SlopeBody::interval(1, 0), GeometryError);
  CHECK_THROWS_AS(SlopeBody::hull_of({{0, 0}, {1, 1}, {2, 2}}), GeometryError);
  CHECK_THROWS_AS(SlopeBody::polygon({{0, 0}, {0, 1}, {1, 0}}), GeometryError);
}

TEST_CASE("unit bodies") {
  CHECK(SlopeBody::unit_square().volume() == 1.0);
  CHECK(SlopeBody::unit_triangle().volume() == 0.5);
  CHECK(SlopeBody::unit_square().contains({1, 1}));
  CHECK_FALSE(SlopeBody::unit_triangle().contains({0.6, 0.6}));
  CHECK(SlopeBody::interval(0, 1).diameter() == 1.0);
}
