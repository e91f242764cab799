#include "pluri/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pluri/envelopes.hpp"
#include "pluri/kernels.hpp"

namespace pluri {
namespace {

std::vector<double> uniform_times(double end, int intervals) {
  if (intervals < 1) throw std::invalid_argument("curve needs at least one time interval");
  std::vector<double> t(std::size_t(intervals) + 1);
  for (int k = 0; k <= intervals; ++k) t[std::size_t(k)] = end * double(k) / intervals;
  t.back() = end;
  return t;
}

void require_pair(const Potential& u0, const Potential& u1) {
  if (!(u0.primal_grid() == u1.primal_grid()) || !(u0.dual_grid() == u1.dual_grid()))
    throw std::invalid_argument("endpoints live on different grids");
}

std::vector<Potential> collect(std::vector<std::optional<Potential>>& slots) {
  std::vector<Potential> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

Potential convex_frame(std::vector<double> values, const SlopeWindow& window, const Potential& like,
                       const std::string& label) {
  PrimalPotential u{like.primal_grid(), std::move(values), window, true};
  return Potential::from_primal(std::move(u), like.dual_grid(), label);
}

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::subgeodesic: return "subgeodesic";
    case CurveKind::geodesic: return "geodesic";
    case CurveKind::ray: return "ray";
  }
  return "unknown";
}

double endpoint_distance(const Potential& u0, const Potential& u1) {
  require_pair(u0, u1);
  const auto& a = u0.dual();
  const auto& b = u1.dual();
  double d = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    if (a.finite(k) != b.finite(k)) throw std::invalid_argument("endpoints not of same singularity type");
    if (a.finite(k)) d = std::max(d, std::abs(a.values[k] - b.values[k]));
  }
  return std::max(d, sup_distance(u0.primal(), u1.primal()));
}

PotentialCurve geodesic_segment(const Potential& u0, const Potential& u1, int intervals) {
  PotentialCurve c;
  c.kind = CurveKind::geodesic;
  c.lipschitz = endpoint_distance(u0, u1);
  c.times = uniform_times(1.0, intervals);
  std::vector<std::optional<Potential>> slots(c.times.size());
  slots.front() = u0;
  slots.back() = u1;
  const auto& a = u0.dual().values;
  const auto& b = u1.dual().values;
#pragma omp parallel for schedule(static)
  for (int k = 1; k < intervals; ++k) {
    const double t = c.times[std::size_t(k)];
    DualPotential w{u0.dual_grid(), std::vector<double>(a.size(), kInf), {}};
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[j] != kInf) w.values[j] = (1.0 - t) * a[j] + t * b[j];
    slots[std::size_t(k)] = Potential::from_dual(std::move(w), u0.primal_grid(), "geodesic");
  }
  c.frames = collect(slots);
  return c;
}

PotentialCurve hmae_envelope_segment(const Potential& u0, const Potential& u1, int intervals, int t_slope_nodes) {
  if (u0.dim() != 1) throw std::invalid_argument("hmae_envelope_segment is implemented for n=1");
  if (t_slope_nodes < 2) throw std::invalid_argument("hmae_envelope_segment needs at least two t-slope nodes");
  PotentialCurve c;
  c.kind = CurveKind::geodesic;
  c.lipschitz = endpoint_distance(u0, u1);
  c.times = uniform_times(1.0, intervals);

  const std::vector<double> x = u0.primal_grid().axis().nodes();
  const std::vector<double> p = u0.dual_grid().axis(0).nodes();
  const double bound = c.lipschitz;
  std::vector<double> q;
  if (bound == 0.0) {
    q = {0.0};
  } else {
    q.resize(std::size_t(t_slope_nodes));
    for (int k = 0; k < t_slope_nodes; ++k) q[std::size_t(k)] = -bound + 2.0 * bound * k / (t_slope_nodes - 1);
  }

  const std::size_t n = x.size();
  std::vector<double> data(n * c.times.size(), kInf);
  std::copy(u0.primal().values.begin(), u0.primal().values.end(), data.begin());
  std::copy(u1.primal().values.begin(), u1.primal().values.end(), data.end() - std::ptrdiff_t(n));

  std::vector<double> conj(p.size() * q.size());
  kernels::conjugate_2d(x, c.times, data, p, q, conj);
  std::vector<double> env(data.size());
  kernels::conjugate_2d(p, q, conj, x, c.times, env);

  const SlopeWindow window = hull_union(u0.window(), u1.window());
  std::vector<std::optional<Potential>> slots(c.times.size());
  slots.front() = u0;
  slots.back() = u1;
#pragma omp parallel for schedule(static)
  for (int k = 1; k < intervals; ++k) {
    const auto row = env.begin() + std::ptrdiff_t(std::size_t(k) * n);
    slots[std::size_t(k)] = convex_frame(std::vector<double>(row, row + std::ptrdiff_t(n)), window, u0, "hmae");
  }
  c.frames = collect(slots);
  return c;
}

PotentialCurve barrier_subgeodesic(const Potential& u0, const Potential& u1, int intervals) {
  PotentialCurve c;
  c.kind = CurveKind::subgeodesic;
  c.lipschitz = endpoint_distance(u0, u1);
  c.times = uniform_times(1.0, intervals);
  const double lip = c.lipschitz;
  const SlopeWindow window = hull_union(u0.window(), u1.window());
  std::vector<std::optional<Potential>> slots(c.times.size());
  slots.front() = u0;
  slots.back() = u1;
  const auto& a = u0.primal().values;
  const auto& b = u1.primal().values;
#pragma omp parallel for schedule(static)
  for (int k = 1; k < intervals; ++k) {
    const double t = c.times[std::size_t(k)];
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = std::max(a[i] - lip * t, b[i] + lip * (t - 1.0));
    slots[std::size_t(k)] = convex_frame(std::move(v), window, u0, "barrier");
  }
  c.frames = collect(slots);
  return c;
}

PotentialCurve mollify_time(const PotentialCurve& curve, double eps) {
  const double dt = curve.step();
  if (curve.size() < 3 || !(eps >= 2.0 * dt - 1e-12)) throw std::invalid_argument("mollify_time: eps below two time steps");
  const double t0 = curve.times.front();
  const double t1 = curve.times.back();
  if (2.0 * eps > t1 - t0) throw std::invalid_argument("mollify_time: eps wider than half the curve");
  const double slack = 1e-9 * dt;

  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < curve.size(); ++j)
    if (curve.times[j] >= t0 + eps - slack && curve.times[j] <= t1 - eps + slack) keep.push_back(j);

  SlopeWindow window = curve.frames.front().window();
  for (const auto& f : curve.frames) window = hull_union(window, f.window());

  PotentialCurve out;
  out.kind = curve.kind;
  out.lipschitz = curve.lipschitz;
  out.stabilized = curve.stabilized;
  for (std::size_t j : keep) out.times.push_back(curve.times[j]);
  std::vector<std::optional<Potential>> slots(keep.size());
  const std::size_t n = curve.frames.front().primal().values.size();
#pragma omp parallel for schedule(static)
  for (long jj = 0; jj < long(keep.size()); ++jj) {
    const double tj = curve.times[keep[std::size_t(jj)]];
    std::vector<double> v(n, 0.0);
    double total = 0.0;
    std::vector<std::pair<std::size_t, double>> weights;
    for (std::size_t k = 0; k < curve.size(); ++k) {
      const double s = (curve.times[k] - tj) / eps;
      if (std::abs(s) >= 1.0) continue;
      const double w = std::pow(1.0 - s * s, 3);
      weights.emplace_back(k, w);
      total += w;
    }
    for (auto [k, w] : weights) {
      const auto& f = curve.frames[k].primal().values;
      for (std::size_t i = 0; i < n; ++i) v[i] += (w / total) * f[i];
    }
    slots[std::size_t(jj)] = convex_frame(std::move(v), window, curve.frames.front(), "mollified");
  }
  out.frames = collect(slots);
  return out;
}

double curve_distance(const PotentialCurve& a, const PotentialCurve& b) {
  if (a.size() != b.size()) throw std::invalid_argument("curve_distance: curves have different time grids");
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, sup_distance(a.frames[k].primal(), b.frames[k].primal()));
  return d;
}

PotentialCurve geodesic_ray(const Potential& phi, const Potential& psi, double horizon, int intervals,
                            std::span<const double> l_schedule) {
  if (phi.dim() != 1) throw std::invalid_argument("geodesic_ray is implemented for n=1");
  require_pair(phi, psi);
  if (!(horizon > 0)) throw std::invalid_argument("geodesic_ray: horizon must be positive");
  const double tol = phi.discretization().tolerances().lt;
  double gap = 0.0;
  for (std::size_t i = 0; i < phi.primal().values.size(); ++i) {
    const double d = psi.primal().values[i] - phi.primal().values[i];
    if (d > tol) throw std::invalid_argument("geodesic_ray: psi exceeds phi beyond tolerance");
    gap = std::max(gap, -d);
  }
  // The dual gap also sees slopes the box cannot resolve (poles).
  for (std::size_t k = 0; k < phi.dual().values.size(); ++k)
    if (phi.dual().finite(k) && psi.dual().finite(k))
      gap = std::max(gap, std::abs(psi.dual().values[k] - phi.dual().values[k]));

  std::vector<double> schedule;
  if (l_schedule.empty()) {
    for (double l : geometric_schedule(std::ldexp(std::max(1.0, gap), 14)))
      if (l >= horizon) schedule.push_back(l);
  } else {
    for (double l : l_schedule)
      if (l >= horizon) schedule.push_back(l);
  }
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] > schedule[k - 1])) throw std::invalid_argument("geodesic_ray: schedule must increase");
  if (schedule.empty()) throw std::invalid_argument("geodesic_ray: schedule has no l >= horizon");

  PotentialCurve c;
  c.kind = CurveKind::ray;
  c.times = uniform_times(horizon, intervals);
  c.l_schedule = schedule;

  const auto& a = phi.dual().values;
  const DualGrid& grid = phi.dual_grid();
  // Duals of max(phi - l, psi) for each l.
  std::vector<DualPotential> targets;
  for (double l : schedule) {
    DualPotential m{grid, std::vector<double>(a.size(), kInf), {}};
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k] != kInf) m.values[k] = std::min(a[k] + l, psi.dual().values[k]);
    targets.push_back(dual_convexify(m));
  }
  double lip = 0.0;
  const DualPotential& last_target = targets.back();
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] != kInf && last_target.finite(k)) lip = std::max(lip, std::abs(last_target.values[k] - a[k]) / schedule.back());
  c.lipschitz = lip;

  auto frame_at = [&](std::size_t li, double t) {
    const double l = schedule[li];
    DualPotential w{grid, std::vector<double>(a.size(), kInf), {}};
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k] != kInf && targets[li].finite(k)) w.values[k] = a[k] + (t / l) * (targets[li].values[k] - a[k]);
    return Potential::from_dual(std::move(w), phi.primal_grid(), "ray");
  };

  std::vector<std::optional<Potential>> slots(c.times.size());
  std::vector<std::uint8_t> settled(c.times.size(), 1);
  const std::size_t nl = schedule.size();
#pragma omp parallel for schedule(static)
  for (long k = 0; k < long(c.times.size()); ++k) {
    const double t = c.times[std::size_t(k)];
    Potential last = frame_at(nl - 1, t);
    if (nl >= 3) {
      const Potential mid = frame_at(nl - 2, t);
      const Potential early = frame_at(nl - 3, t);
      const bool ok = sup_distance(last.primal(), mid.primal()) <= tol && sup_distance(mid.primal(), early.primal()) <= tol;
      settled[std::size_t(k)] = ok ? 1 : 0;
    }
    slots[std::size_t(k)] = std::move(last);
  }
  c.frames = collect(slots);
  c.stabilized = nl >= 3 && std::all_of(settled.begin(), settled.end(), [](std::uint8_t s) { return s != 0; });
  return c;
}

LegendreSlice ray_time_legendre(const PotentialCurve& ray, double tau) {
  if (ray.frames.empty()) throw std::invalid_argument("ray_time_legendre: empty curve");
  const DualGrid& grid = ray.frames.front().dual_grid();
  const std::size_t m = grid.size();
  const std::size_t nf = ray.size();
  LegendreSlice out;
  DualPotential w{grid, std::vector<double>(m, kInf), {}};
  for (std::size_t k = 0; k < m; ++k) {
    if (!ray.frames.front().dual().finite(k)) continue;
    double best = -kInf;
    double best_before_last = -kInf;
    for (std::size_t f = 0; f < nf; ++f) {
      const double v = ray.frames[f].dual().values[k] + ray.times[f] * tau;
      if (f + 1 < nf) best_before_last = std::max(best_before_last, v);
      best = std::max(best, v);
    }
    const double last = ray.frames.back().dual().values[k] + ray.times.back() * tau;
    if (nf > 1 && last > best_before_last + 1e-12 * std::max(1.0, std::abs(last))) {
      ++out.unbounded_nodes;
      continue;
    }
    w.values[k] = best;
  }
  if (w.finite_count() == 0) {
    out.minus_infinity = true;
    return out;
  }
  out.potential = Potential::from_dual(std::move(w), ray.frames.front().primal_grid(), "legendre_slice");
  return out;
}

EnergyAlongReport energy_along(const BigClass& cls, const PotentialCurve& curve) {
  EnergyAlongReport r;
  const std::size_t n = curve.size();
  r.values.assign(n, 0.0);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < long(n); ++k) r.values[std::size_t(k)] = energy(cls, curve.frames[std::size_t(k)]).value;

  const double tol = cls.tol().energy;
  const double dt = curve.step();
  for (std::size_t k = 0; k + 1 < n; ++k) r.secant_slopes.push_back((r.values[k + 1] - r.values[k]) / dt);
  r.min_second_difference = kInf;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double d2 = r.values[k + 1] - 2.0 * r.values[k] + r.values[k - 1];
    r.second_differences.push_back(d2);
    r.min_second_difference = std::min(r.min_second_difference, d2);
  }
  if (r.second_differences.empty()) r.min_second_difference = 0.0;
  r.convex = r.min_second_difference >= -10.0 * tol;

  const double span = curve.times.back() - curve.times.front();
  for (std::size_t k = 0; k < n; ++k) {
    const double s = span > 0 ? (curve.times[k] - curve.times.front()) / span : 0.0;
    const double chord = (1.0 - s) * r.values.front() + s * r.values.back();
    const double dev = std::abs(r.values[k] - chord);
    r.chord_deviation = std::isnan(dev) ? kInf : std::max(r.chord_deviation, dev);
  }
  r.linear = r.chord_deviation <= tol;
  return r;
}

DerivativeReport derivative_check(const BigClass& cls, const PotentialCurve& curve, int source_intervals) {
  if (source_intervals < 64) throw std::invalid_argument("derivative_check: time step too coarse (K < 64)");
  if (curve.frames.front().dim() != 1) throw std::invalid_argument("derivative_check is implemented for n=1");
  const double dt = curve.step();
  const int stride = std::max(1, int(std::lround(8.0 / (source_intervals * dt))));
  const std::size_t n = curve.size();
  if (n < std::size_t(2 * stride + 1)) throw std::invalid_argument("derivative_check: curve too short for the stride");

  const EnergyAlongReport e = energy_along(cls, curve);
  const double vol = cls.volume();
  const PrimalGrid& g = curve.frames.front().primal_grid();
  const double h = g.spacing();

  DerivativeReport r;
  r.stride = stride;
  for (std::size_t k = std::size_t(stride); k + std::size_t(stride) < n; ++k) r.times.push_back(curve.times[k]);
  const std::size_t rows = r.times.size();
  r.first_fd.resize(rows);
  r.first_formula.resize(rows);
  r.second_fd.resize(rows);
  r.second_formula.resize(rows);

#pragma omp parallel for schedule(static)
  for (long row = 0; row < long(rows); ++row) {
    const std::size_t k = std::size_t(row) + std::size_t(stride);
    const double sdt = stride * dt;
    r.first_fd[std::size_t(row)] = (e.values[k + std::size_t(stride)] - e.values[k - std::size_t(stride)]) / (2.0 * sdt);
    r.second_fd[std::size_t(row)] =
        (e.values[k + std::size_t(stride)] - 2.0 * e.values[k] + e.values[k - std::size_t(stride)]) / (sdt * sdt);

    const auto& prev = curve.frames[k - 1].primal().values;
    const auto& cur = curve.frames[k].primal().values;
    const auto& next = curve.frames[k + 1].primal().values;
    const std::vector<double> mass = ma_measure(curve.frames[k]).masses;
    double first = 0.0;
    double second = 0.0;
    double gradient = 0.0;
    double prev_rate = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double rate = (next[i] - prev[i]) / (2.0 * dt);
      const double accel = (next[i] - 2.0 * cur[i] + prev[i]) / (dt * dt);
      first += rate * mass[i];
      second += accel * mass[i];
      if (i > 0) {
        const double slope = (rate - prev_rate) / h;
        gradient += slope * slope * h;
      }
      prev_rate = rate;
    }
    r.first_formula[std::size_t(row)] = first / vol;
    r.second_formula[std::size_t(row)] = (second - gradient) / vol;
  }

  auto rel = [](const std::vector<double>& fd, const std::vector<double>& formula) {
    double err = 0.0;
    double scale = 1e-12;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      err = std::max(err, std::abs(fd[i] - formula[i]));
      scale = std::max(scale, std::abs(formula[i]));
    }
    return err / scale;
  };
  r.first_rel_error = rel(r.first_fd, r.first_formula);
  r.second_rel_error = rel(r.second_fd, r.second_formula);
  return r;
}

}  // namespace pluri
