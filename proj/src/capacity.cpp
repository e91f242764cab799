#include "pluri/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

namespace pluri {
namespace {

void require_set(const NodeSet& set, const BigClass& cls) {
  if (set.size() != cls.disc().primal.size()) throw std::invalid_argument("node set does not match the primal grid");
  if (std::none_of(set.begin(), set.end(), [](std::uint8_t b) { return b != 0; }))
    throw std::invalid_argument("empty node set");
}

double mass_on(const NodeSet& set, const Potential& u) {
  const MaMeasure m = ma_measure(u);
  double s = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set[i]) s += m.masses[i];
  return s;
}

}  // namespace

double capacity(const NodeSet& set, const BigClass& cls) {
  require_set(set, cls);
  const Potential& v = cls.envelope();
  PrimalPotential band{v.primal_grid(), v.primal().values, v.window(), false};
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set[i]) band.values[i] -= 1.0;
  const Potential h = Potential::from_primal(convex_envelope(band, v.dual_grid()), v.dual_grid(), "band_extremal");
  return mass_on(set, h);
}

double capacity_oracle(const NodeSet& set, const BigClass& cls, std::mt19937_64& rng, int samples) {
  require_set(set, cls);
  const Potential& v = cls.envelope();
  const DualPotential& vd = v.dual();
  std::vector<std::size_t> slopes;
  for (std::size_t k = 0; k < vd.values.size(); ++k)
    if (vd.finite(k)) slopes.push_back(k);
  std::uniform_int_distribution<std::size_t> pick(0, slopes.size() - 1);
  std::uniform_int_distribution<int> pieces(1, 5);
  std::uniform_real_distribution<double> depth(0.0, 1.0);
  const PrimalGrid& g = v.primal_grid();

  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    PrimalPotential u{g, v.primal().values, v.window(), true};
    for (double& x : u.values) x -= 1.0;
    const int k = pieces(rng);
    for (int j = 0; j < k; ++j) {
      const std::size_t node = slopes[pick(rng)];
      const Vec2 p = vd.grid.point(node);
      const double c = -vd.values[node] - depth(rng);
      for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = std::max(u.values[i], dot(p, g.point(i)) + c);
    }
    best = std::max(best, mass_on(set, Potential::from_primal(std::move(u), v.dual_grid(), "band")));
  }
  return best;
}

AlexanderTaylor alexander_taylor(const NodeSet& set, const BigClass& cls) {
  require_set(set, cls);
  const ExtremalResult r = extremal_function(set, cls);
  return {r.sup_excess, std::exp(-r.sup_excess)};
}

CapacityReport capacity_report(const NodeSet& set, const BigClass& cls) {
  const AlexanderTaylor at = alexander_taylor(set, cls);
  return {set, capacity(set, cls), at.m, at.t};
}

bool ComparisonTable::all_ok() const {
  return c_bounded && std::all_of(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.prop25_ok; });
}

ComparisonTable comparison_experiment(const BigClass& first, const BigClass& second, const std::vector<NamedSet>& family) {
  if (!(first.disc().primal == second.disc().primal))
    throw std::invalid_argument("comparison_experiment: classes must share the primal grid");
  if (family.empty()) throw std::invalid_argument("comparison_experiment: empty set family");
  const double n = first.dim();
  const double vol = first.volume();
  const double tol = first.tol().mass;

  std::vector<std::optional<ComparisonRow>> slots(family.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < long(family.size()); ++k) {
    const NamedSet& e = family[std::size_t(k)];
    ComparisonRow row;
    row.id = e.id;
    row.cap1 = capacity(e.nodes, first);
    row.cap2 = capacity(e.nodes, second);
    row.t1 = alexander_taylor(e.nodes, first).t;
    row.prop25_bound = row.cap1 > 0 ? std::numbers::e * std::exp(-std::pow(vol / row.cap1, 1.0 / n)) : 0.0;
    row.prop25_ok = row.t1 <= row.prop25_bound + tol;
    row.thm26_c = std::max(std::pow(row.cap1, n) / row.cap2, row.cap2 / std::pow(row.cap1, 1.0 / n));
    slots[std::size_t(k)] = row;
  }
  ComparisonTable t;
  t.c_min = kInf;
  t.c_max = 0.0;
  for (auto& s : slots) {
    t.c_min = std::min(t.c_min, s->thm26_c);
    t.c_max = std::max(t.c_max, s->thm26_c);
    t.rows.push_back(*s);
  }
  t.c_bounded = std::isfinite(t.c_max) && t.c_min > 0 && t.c_max / t.c_min <= 1e3;
  return t;
}

NodeSet ball_set(const PrimalGrid& grid, Vec2 centre, double radius) {
  NodeSet s(grid.size(), 0);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = norm(grid.point(i) - centre) <= radius + 1e-12 ? 1 : 0;
  return s;
}

std::vector<NamedSet> disc_family(const PrimalGrid& grid, Vec2 centre, double r_min, double r_max, int count) {
  if (count < 1) throw std::invalid_argument("disc_family: count must be positive");
  std::vector<NamedSet> out;
  for (int k = 0; k < count; ++k) {
    const double r = count == 1 ? r_min : r_min + (r_max - r_min) * k / (count - 1);
    char id[48];
    std::snprintf(id, sizeof id, "disc_r%.4f", r);
    out.push_back({id, ball_set(grid, centre, r)});
  }
  return out;
}

}  // namespace pluri
