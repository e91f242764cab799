#include <doctest.h>

#include "pluri/envelopes.hpp"
#include "support.hpp"

using namespace pluri;

namespace {

const Discretization& line() {
  static const Discretization d = Discretization::standard(SlopeBody::interval(0, 1));
  return d;
}

Potential random_convex(std::mt19937_64& rng) {
  const auto& d = line();
  const auto pieces = gen::pieces(rng, gen::integer(rng, 2, 5), 0.0, 1.0);
  auto f = gen::bumpy(d.primal, gen::convex_samples(d.primal, pieces).values, rng, 2, SlopeWindow::interval(0, 1));
  return project(f, d.dual);
}

}  // namespace

TEST_CASE("projection lies below the obstacle and is idempotent") {
  const auto& d = line();
  for (int trial = 0; trial < 50; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 50);
    const auto f = gen::bumpy(d.primal, std::vector<double>(d.primal.size(), 0.0), rng, 4, SlopeWindow::interval(0, 1));
    const Potential u = project(f, d.dual);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(u.primal().values[i] <= f.values[i] + 1e-12);
    PrimalPotential again = u.primal();
    again.convex = false;
    CHECK(sup_distance(project(again, d.dual).primal(), u.primal()) <= 1e-12);
  }
}

TEST_CASE("rooftop lies below both arguments and matches the dual fast path") {
  const double tol = line().tolerances().lt;
  for (int trial = 0; trial < 50; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 51);
    const Potential u = random_convex(rng);
    const Potential v = random_convex(rng);
    const Potential r = rooftop(u, v);
    for (std::size_t i = 0; i < r.primal().values.size(); ++i)
      CHECK(r.primal().values[i] <= std::min(u.primal().values[i], v.primal().values[i]) + 1e-12);
    CHECK(sup_distance(r.primal(), rooftop_dual(u, v).primal()) <= tol);
    CHECK(sup_distance(r.primal(), rooftop(v, u).primal()) <= 1e-12);
    CHECK(sup_distance(rooftop(u, u).primal(), u.primal()) <= 1e-12);
  }
}

TEST_CASE("rooftop of disjoint windows is rejected") {
  const auto& d = line();
  PresetParams lo, hi;
  lo.sub = SlopeBody::interval(0, 0.25);
  hi.sub = SlopeBody::interval(0.5, 1);
  const Potential a = preset_potential("half_body", lo, d);
  const Potential b = preset_potential("half_body", hi, d);
  CHECK_THROWS_AS(rooftop(a, b), std::invalid_argument);
}

TEST_CASE("convex combinations interpolate on the primal side") {
  for (int trial = 0; trial < 30; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 52);
    const Potential u = random_convex(rng);
    const Potential v = random_convex(rng);
    CHECK(sup_distance(convex_combination(u, v, 1.0).primal(), u.primal()) <= 1e-12);
    CHECK(sup_distance(convex_combination(u, v, 0.0).primal(), v.primal()) <= 1e-12);
    const double t = gen::uniform(rng, 0, 1);
    const Potential w = convex_combination(u, v, t);
    for (std::size_t i = 0; i < w.primal().values.size(); ++i)
      CHECK(w.primal().values[i] ==
            doctest::Approx(t * u.primal().values[i] + (1 - t) * v.primal().values[i]).epsilon(1e-12));
  }
  auto rng = gen::rng_for(0, 52);
  const Potential u = random_convex(rng);
  CHECK_THROWS_AS(convex_combination(u, u, 1.5), std::invalid_argument);
}

TEST_CASE("geometric schedule") {
  CHECK(geometric_schedule(8) == std::vector<double>{1, 2, 4, 8});
  CHECK(geometric_schedule(10) == std::vector<double>{1, 2, 4, 8, 10});
  CHECK(geometric_schedule(0.5) == std::vector<double>{1});
}

TEST_CASE("singularity-type envelope of V toward a catalog potential") {
  const auto& d = line();
  const double tol = d.tolerances().lt;
  const Potential v = BigClass::toric(d).envelope();
  SUBCASE("full-mass target returns V") {
    const RwnSweepResult r = rwn_envelope(v, preset_potential("entropy", {}, d));
    CHECK(r.monotone);
    CHECK(r.stabilized);
    CHECK(sup_distance(r.limit.primal(), v.primal()) <= tol);
  }
  SUBCASE("half_body target returns the support function of the sub-body") {
    const Potential hb = preset_potential("half_body", {}, d);
    const RwnSweepResult r = rwn_envelope(v, hb);
    CHECK(r.monotone);
    CHECK(sup_distance(r.limit.primal(), hb.primal()) <= tol);
    CHECK(r.prediction_error <= tol);
  }
  SUBCASE("sweep distances are non-increasing") {
    PresetParams g;
    g.gamma = 0.3;
    const RwnSweepResult r = rwn_envelope(preset_potential("entropy", {}, d), preset_potential("log_pole", g, d));
    for (std::size_t k = 1; k < r.sweep.size(); ++k) CHECK(r.sweep[k].sup_distance <= r.sweep[k - 1].sup_distance + tol);
  }
}

TEST_CASE("extremal function of a single node") {
  const auto& d = line();
  const BigClass cls = BigClass::toric(d);
  for (std::size_t node : {100u, 256u, 300u, 480u}) {
    CAPTURE(node);
    std::vector<std::uint8_t> set(d.primal.size(), 0);
    set[node] = 1;
    const double x0 = d.primal.point(node).x;
    const ExtremalResult e = extremal_function(set, cls);
    // sup{u : u(x0) <= V(x0)} = V(x0) + max(0, x - x0) for slopes in [0, 1].
    for (std::size_t i = 0; i < d.primal.size(); ++i) {
      const double x = d.primal.point(i).x;
      CHECK(e.extremal.primal().values[i] == doctest::Approx(std::max(0.0, x0) + std::max(0.0, x - x0)).epsilon(1e-12));
    }
    CHECK(e.sup_excess == doctest::Approx(std::abs(x0)).epsilon(1e-12));
  }
}

TEST_CASE("extremal function stays below V on the set") {
  const auto d = Discretization::standard(SlopeBody::unit_triangle());
  const BigClass cls = BigClass::toric(d);
  for (int trial = 0; trial < 5; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 53);
    std::vector<std::uint8_t> set(d.primal.size(), 0);
    const Vec2 c{gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2)};
    const double r = gen::uniform(rng, 0.3, 1.5);
    for (std::size_t i = 0; i < set.size(); ++i) set[i] = norm(d.primal.point(i) - c) <= r;
    const ExtremalResult e = extremal_function(set, cls);
    for (std::size_t i = 0; i < set.size(); ++i)
      if (set[i]) CHECK(e.extremal.primal().values[i] <= cls.envelope().primal().values[i] + 1e-12);
    CHECK(e.sup_excess >= 0);
  }
}
