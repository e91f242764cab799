#include "pluri/envelopes.hpp"

#include <algorithm>
#include <cmath>

namespace pluri {
namespace {

std::shared_ptr<const TailModel> lower_branch_tail(const Potential& u, const Potential& v) {
  if (!u.tail() || !v.tail()) return nullptr;
  auto a = u.shared_tail();
  auto b = v.shared_tail();
  auto pick = [a, b](double x) { return a->value(x) <= b->value(x) ? a : b; };
  return std::make_shared<const TailModel>(TailModel{[pick](double x) { return pick(x)->value(x); },
                                                     [pick](double x) { return pick(x)->slope(x); },
                                                     [pick](double x) { return pick(x)->curvature(x); }});
}

}  // namespace

Potential project(const PrimalPotential& f, const DualGrid& grid) {
  return Potential::from_primal(convex_envelope(f, grid), grid, "project");
}

Potential rooftop(const Potential& u, const Potential& v) {
  if (!(u.primal_grid() == v.primal_grid()) || !(u.dual_grid() == v.dual_grid()))
    throw std::invalid_argument("rooftop: potentials live on different grids");
  PrimalPotential m{u.primal_grid(), u.primal().values, intersect(u.window(), v.window()), false};
  if (m.window.empty() || (m.window.dim == 2 && m.window.polygon.empty()))
    throw std::invalid_argument("rooftop: slope windows do not meet, the envelope is identically -inf");
  for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = std::min(m.values[i], v.primal().values[i]);
  Potential r = Potential::from_primal(convex_envelope(m, u.dual_grid()), u.dual_grid(), "rooftop");
  return r.with_tail(lower_branch_tail(u, v));
}

Potential rooftop_dual(const Potential& u, const Potential& v) {
  Potential r = Potential::from_dual(dual_max(u.dual(), v.dual()), u.primal_grid(), "rooftop");
  return r.with_tail(lower_branch_tail(u, v));
}

Potential convex_combination(const Potential& u, const Potential& v, double t) {
  if (u.dim() != 1) throw std::invalid_argument("convex_combination is implemented for n=1");
  if (!(u.primal_grid() == v.primal_grid()) || !(u.dual_grid() == v.dual_grid()))
    throw std::invalid_argument("convex_combination: potentials live on different grids");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("convex_combination: t must lie in [0, 1]");
  const SlopeWindow& a = u.window();
  const SlopeWindow& b = v.window();
  PrimalPotential m{u.primal_grid(), u.primal().values,
                    SlopeWindow::interval(t * a.lo + (1 - t) * b.lo, t * a.hi + (1 - t) * b.hi), true};
  for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = t * m.values[i] + (1 - t) * v.primal().values[i];
  Potential out = Potential::from_primal(std::move(m), u.dual_grid(), "blend");
  if (!u.tail() || !v.tail()) return out;
  auto ta = u.shared_tail();
  auto tb = v.shared_tail();
  return out.with_tail(std::make_shared<const TailModel>(
      TailModel{[=](double x) { return t * ta->value(x) + (1 - t) * tb->value(x); },
                [=](double x) { return t * ta->slope(x) + (1 - t) * tb->slope(x); },
                [=](double x) { return t * ta->curvature(x) + (1 - t) * tb->curvature(x); }}));
}

std::vector<double> geometric_schedule(double cap) {
  std::vector<double> s;
  for (double c = 1.0; c < cap; c *= 2.0) s.push_back(c);
  s.push_back(std::max(cap, 1.0));
  return s;
}

RwnSweepResult rwn_envelope(const Potential& phi, const Potential& psi, std::span<const double> schedule) {
  std::vector<double> owned;
  if (schedule.empty()) {
    owned = geometric_schedule(std::ldexp(std::max(1.0, sup_distance(phi.primal(), psi.primal())), 14));
    schedule = owned;
  }
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] > schedule[k - 1])) throw std::invalid_argument("rwn_envelope: schedule must increase");

  std::vector<Potential> steps;
  steps.reserve(schedule.size());
  bool monotone = true;
  for (double c : schedule) {
    steps.push_back(rooftop(phi, psi.shifted(c)));
    if (steps.size() >= 2) {
      const auto& prev = steps[steps.size() - 2].primal().values;
      const auto& cur = steps.back().primal().values;
      double scale = 1.0;
      for (double x : cur) scale = std::max(scale, std::abs(x));
      for (std::size_t i = 0; i < cur.size(); ++i)
        if (cur[i] < prev[i] - 1e-12 * scale) monotone = false;
    }
  }
  const Potential& limit = steps.back();
  std::vector<RwnStep> sweep;
  for (std::size_t k = 0; k < steps.size(); ++k)
    sweep.push_back({schedule[k], sup_distance(steps[k].primal(), limit.primal())});

  DualPotential pred = phi.dual();
  for (std::size_t k = 0; k < pred.values.size(); ++k)
    if (!psi.dual().finite(k)) pred.values[k] = kInf;
  Potential prediction = Potential::from_dual(std::move(pred), phi.primal_grid(), "rwn_prediction");

  const double tol = phi.discretization().tolerances().lt;
  const bool stabilized =
      sweep.size() >= 2 && sweep[sweep.size() - 2].sup_distance <= tol && sweep.back().sup_distance <= tol;
  const double err = sup_distance(limit.primal(), prediction.primal());
  return {limit.with_label("rwn_limit"), std::move(sweep), stabilized, monotone, std::move(prediction), err};
}

ExtremalResult extremal_function(const std::vector<std::uint8_t>& set, const BigClass& cls) {
  const Potential& v = cls.envelope();
  const PrimalGrid& pg = cls.disc().primal;
  const DualGrid& dg = cls.disc().dual;
  if (set.size() != pg.size()) throw std::invalid_argument("extremal_function: mask size mismatch");
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set[i]) nodes.push_back(i);
  if (nodes.empty()) throw std::invalid_argument("extremal_function: empty set");

  // g_E(p) = max over x in E of <p,x> - V(x); the extremal function is its transform.
  DualPotential g{dg, std::vector<double>(dg.size(), kInf), {}};
  const long m = long(dg.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < m; ++k) {
    if (!v.dual().finite(std::size_t(k))) continue;
    const Vec2 p = dg.point(std::size_t(k));
    double best = -kInf;
    for (std::size_t i : nodes) best = std::max(best, dot(p, pg.point(i)) - v.primal().values[i]);
    g.values[std::size_t(k)] = best;
  }
  Potential ext = Potential::from_dual(g, pg, "extremal");

  double excess = -kInf;
  for (std::size_t i = 0; i < pg.size(); ++i) excess = std::max(excess, ext.primal().values[i] - v.primal().values[i]);
  // Asymptotic directions: along an outward direction the difference tends to
  // V*(p) - V_E*(p) minimized over the exposed face, so boundary nodes of dom V* suffice.
  const auto& vd = v.dual();
  auto boundary = [&](std::size_t k) {
    if (dg.dim() == 1) return k == 0 || k + 1 == dg.size() || !vd.finite(k - 1) || !vd.finite(k + 1);
    const int n0 = dg.axis(0).count;
    const int n1 = dg.axis(1).count;
    const int i = int(k % n0);
    const int j = int(k / n0);
    if (i == 0 || j == 0 || i + 1 == n0 || j + 1 == n1) return true;
    return !vd.finite(k - 1) || !vd.finite(k + 1) || !vd.finite(k - n0) || !vd.finite(k + n0);
  };
  for (std::size_t k = 0; k < dg.size(); ++k)
    if (vd.finite(k) && boundary(k)) excess = std::max(excess, vd.values[k] - g.values[k]);
  return {std::move(ext), excess};
}

}  // namespace pluri
