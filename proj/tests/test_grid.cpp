#include <doctest.h>

#include <numeric>

#include "pluri/grid.hpp"
#include "support.hpp"

using namespace pluri;

TEST_CASE("primal grid nodes and widening") {
  const PrimalGrid g(1, 8.0, 513);
  CHECK(g.spacing() == doctest::Approx(16.0 / 512));
  CHECK(g.point(0).x == -8.0);
  CHECK(g.point(512).x == 8.0);
  CHECK(g.point(256).x == 0.0);
  const PrimalGrid w = g.widened(3);
  CHECK(w.points() == 1537);
  CHECK(w.spacing() == doctest::Approx(g.spacing()));
  CHECK(w.half_width() == doctest::Approx(24.0));

  const PrimalGrid g2(2, 4.0, 17);
  CHECK(g2.size() == 289);
  CHECK(g2.point(17 * 3 + 2).x == -3.0);
  CHECK(g2.point(17 * 3 + 2).y == -2.5);
  CHECK_THROWS_AS(PrimalGrid(1, 8.0, 15), std::invalid_argument);
}

TEST_CASE("dual quadrature weights integrate the body area") {
  for (int m : {17, 33, 129}) {
    CAPTURE(m);
    const DualGrid sq(SlopeBody::unit_square(), m);
    const DualGrid tri(SlopeBody::unit_triangle(), m);
    const DualGrid seg(SlopeBody::interval(0.25, 2.0), m);
    auto sum = [](const DualGrid& g) { return std::accumulate(g.weights().begin(), g.weights().end(), 0.0); };
    CHECK(sum(sq) == doctest::Approx(1.0));
    CHECK(sum(tri) == doctest::Approx(0.5));
    CHECK(sum(seg) == doctest::Approx(1.75));
  }
  for (int trial = 0; trial < 30; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 10);
    const SlopeBody body = gen::polygon(rng);
    const DualGrid g(body, 65);
    CHECK(std::accumulate(g.weights().begin(), g.weights().end(), 0.0) == doctest::Approx(body.volume()).epsilon(1e-9));
    for (std::size_t k = 0; k < g.size(); ++k)
      if (g.weights()[k] > 0) CHECK(g.inside(k));
  }
}

TEST_CASE("quadrature weights integrate affine functions exactly on the square") {
  const DualGrid g(SlopeBody::unit_square(), 33);
  double ix = 0, iy = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    ix += g.weights()[k] * g.point(k).x;
    iy += g.weights()[k] * g.point(k).y;
  }
  CHECK(ix == doctest::Approx(0.5));
  CHECK(iy == doctest::Approx(0.5));
}

TEST_CASE("tolerances follow the resolution formulas") {
  const auto one = Discretization::standard(SlopeBody::interval(0, 1));
  CHECK(one.primal.points() == 513);
  CHECK(one.primal.half_width() == 8.0);
  const Tolerances t = one.tolerances();
  CHECK(t.lt == doctest::Approx(2 * (16.0 / 512) * 1.0));
  CHECK(t.energy == doctest::Approx(10 * t.lt));
  CHECK(t.mass == doctest::Approx(2.0 / 513));
  CHECK(t.geo == doctest::Approx(5 * t.lt));

  const auto two = Discretization::standard(SlopeBody::unit_square());
  CHECK(two.primal.points() == 129);
  CHECK(two.primal.half_width() == 4.0);
  CHECK(two.tolerances().lt == doctest::Approx(2 * (8.0 / 128) * std::sqrt(2.0)));
  CHECK(two.tolerances().mass == doctest::Approx(2 * 2.0 / 129));
}

TEST_CASE("dual grid equality tracks the body and axes") {
  const DualGrid a(SlopeBody::unit_square(), 33);
  const DualGrid b(SlopeBody::unit_square(), 33);
  const DualGrid c(SlopeBody::unit_triangle(), 33);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.spacing() == doctest::Approx(1.0 / 32));
}
