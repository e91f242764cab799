#include <doctest.h>

#include "pluri/capacity.hpp"
#include "support.hpp"

using namespace pluri;

namespace {

const BigClass& line_class() {
  static const BigClass c = BigClass::toric(Discretization::standard(SlopeBody::interval(0, 1)));
  return c;
}

const BigClass& square_class() {
  static const BigClass c = BigClass::toric(Discretization::standard(SlopeBody::unit_square()));
  return c;
}

NodeSet interval_set(double a, double b) {
  const PrimalGrid& g = line_class().disc().primal;
  NodeSet s(g.size(), 0);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = g.point(i).x >= a - 1e-12 && g.point(i).x <= b + 1e-12;
  return s;
}

}  // namespace

TEST_CASE("capacity of intervals in closed form") {
  // For V = max(0, x): E containing the origin has capacity 1; E = [a, b] with a >= 1 has
  // capacity 1 / a, and b <= -1 gives 1 / |b|.
  const double tol = line_class().tol().mass;
  CHECK(std::abs(capacity(interval_set(-0.5, 0.5), line_class()) - 1.0) <= tol);
  CHECK(std::abs(capacity(interval_set(2, 3), line_class()) - 0.5) <= tol);
  CHECK(std::abs(capacity(interval_set(4, 6), line_class()) - 0.25) <= tol);
  CHECK(std::abs(capacity(interval_set(-3, -2), line_class()) - 0.5) <= tol);
}

TEST_CASE("ball sets against a brute-force scan") {
  const PrimalGrid& g = square_class().disc().primal;
  for (int trial = 0; trial < 20; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 90);
    const Vec2 c{gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2)};
    const double r = gen::uniform(rng, 0.1, 2);
    const NodeSet s = ball_set(g, c, r);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double dist = norm(g.point(i) - c);
      if (dist < r - 1e-9) CHECK(s[i] == 1);
      if (dist > r + 1e-9) CHECK(s[i] == 0);
    }
  }
}

TEST_CASE("capacity is monotone and bounded by the volume") {
  const BigClass& cls = square_class();
  const double tol = cls.tol().mass;
  for (int trial = 0; trial < 5; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 91);
    const Vec2 c{gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1)};
    const double r = gen::uniform(rng, 0.3, 1.0);
    const double small = capacity(ball_set(cls.disc().primal, c, r), cls);
    const double big = capacity(ball_set(cls.disc().primal, c, 2 * r), cls);
    CHECK(small <= big + tol);
    CHECK(big <= cls.volume() + tol);
    CHECK(small >= 0);
    const AlexanderTaylor at_small = alexander_taylor(ball_set(cls.disc().primal, c, r), cls);
    const AlexanderTaylor at_big = alexander_taylor(ball_set(cls.disc().primal, c, 2 * r), cls);
    CHECK(at_small.m >= at_big.m - 1e-12);
    CHECK(at_small.t == doctest::Approx(std::exp(-at_small.m)));
  }
}

TEST_CASE("sampled band potentials never beat the extremal capacity") {
  const BigClass& cls = square_class();
  const double tol = cls.tol().mass;
  auto rng = gen::rng_for(0, 92);
  const NodeSet s = ball_set(cls.disc().primal, {0.5, 0.5}, 1.0);
  CHECK(capacity_oracle(s, cls, rng, 200) <= capacity(s, cls) + tol);
}

TEST_CASE("disc family and comparison table") {
  const BigClass& sq = square_class();
  const BigClass tri = BigClass::toric(Discretization::standard(SlopeBody::unit_triangle()));
  const auto family = disc_family(sq.disc().primal, {2, 2}, 0.25, 1.5, 4);
  REQUIRE(family.size() == 4);
  const ComparisonTable t = comparison_experiment(sq, tri, family);
  REQUIRE(t.rows.size() == 4);
  for (const auto& row : t.rows) {
    CHECK(row.prop25_bound == doctest::Approx(std::exp(1.0) * std::exp(-std::sqrt(sq.volume() / row.cap1))));
    CHECK(row.prop25_ok);
    CHECK(row.thm26_c > 0);
  }
  CHECK(t.c_min <= t.c_max);
  CHECK(t.all_ok());
}
