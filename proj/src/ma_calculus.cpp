#include "pluri/ma_calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pluri/kernels.hpp"

namespace pluri {
namespace {

std::vector<std::uint8_t> finite_mask(const DualPotential& w) {
  std::vector<std::uint8_t> m(w.values.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = w.finite(k) ? 1 : 0;
  return m;
}

/// Quadrature weights over the finite nodes of w.
std::vector<double> finite_weights(const DualPotential& w) {
  const auto mask = finite_mask(w);
  const SlopeWindow win = finite_window(w);
  return cell_weights(w.grid, mask, win.polygon);
}

void require_same_grids(const Potential& a, const Potential& b, const char* what) {
  if (!(a.primal_grid() == b.primal_grid()) || !(a.dual_grid() == b.dual_grid()))
    throw std::invalid_argument(std::string(what) + ": potentials live on different grids");
}

double class_value(const BigClass& cls, const PrimalGrid& grid, std::size_t i) {
  const Potential& v = cls.envelope();
  if (v.primal_grid() == grid) return v.primal().values[i];
  return v.value_at(grid.point(i));
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGaussX = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                           -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                           0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussW = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

struct TailSum {
  double value = 0.0;
  bool divergent = false;
};

// Integral of g over [start, +inf) in direction `dir`, split into doubling segments
// |x| in [2^k L, 2^(k+1) L]. A tail is divergent when the last segment contributions
// stop shrinking (ratio >= 0.9); otherwise the geometric remainder is added.
TailSum doubling_tail(double start, double dir, const std::function<double(double)>& g) {
  constexpr int kSegments = 60;
  const double ln2 = std::log(2.0);
  TailSum out;
  double prev = 0.0;
  double last = 0.0;
  int quiet = 0;
  for (int k = 0; k < kSegments; ++k) {
    double seg = 0.0;
    for (std::size_t q = 0; q < kGaussX.size(); ++q) {
      const double s = (k + 0.5 * (kGaussX[q] + 1.0)) * ln2;
      const double x = dir * start * std::exp(s);
      seg += 0.5 * ln2 * kGaussW[q] * g(x) * start * std::exp(s);
    }
    prev = last;
    last = seg;
    out.value += seg;
    quiet = seg <= 1e-16 * (1.0 + out.value) ? quiet + 1 : 0;
    if (quiet >= 3) return out;
  }
  const double ratio = prev > 0 ? last / prev : 0.0;
  if (ratio >= 0.9 && last > 1e-12 * (1.0 + out.value)) {
    out.divergent = true;
  } else if (ratio > 0) {
    out.value += last * ratio / (1.0 - ratio);
  }
  return out;
}

double dual_integral(const BigClass& cls, const DualPotential& w) {
  const DualPotential& vd = cls.envelope().dual();
  std::vector<std::uint8_t> mask(w.values.size());
  for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = (w.finite(k) && vd.finite(k)) ? 1 : 0;
  std::vector<Vec2> pts;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k]) pts.push_back(w.grid.point(k));
  const auto weights = cell_weights(w.grid, mask, convex_hull(pts, 1e-12));
  double s = 0.0;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k]) s += weights[k] * (vd.values[k] - w.values[k]);
  return s / cls.volume();
}

}  // namespace

MaMeasure ma_measure(const Potential& u) {
  const PrimalPotential& p = u.primal();
  if (!p.convex) throw NotConvexError();
  MaMeasure m;
  m.masses.assign(p.values.size(), 0.0);
  if (u.dim() == 1) {
    const int n = p.grid.points();
    const double h = p.grid.spacing();
    const auto& v = p.values;
    m.masses[0] = (v[1] - v[0]) / h - p.window.lo;
    for (int i = 1; i + 1 < n; ++i) m.masses[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h;
    m.masses[n - 1] = p.window.hi - (v[n - 1] - v[n - 2]) / h;
    for (double& x : m.masses) x = std::max(0.0, x);
  } else {
    const DualPotential& w = u.dual();
    const auto weights = finite_weights(w);
    const std::vector<double> x = p.grid.axis().nodes();
    std::vector<double> vals(w.grid.size());
    std::vector<int> arg(w.grid.size());
    kernels::conjugate_2d(x, x, p.values, w.grid.axis(0).nodes(), w.grid.axis(1).nodes(), vals, arg);
    for (std::size_t k = 0; k < weights.size(); ++k)
      if (weights[k] > 0 && arg[k] >= 0) m.masses[std::size_t(arg[k])] += weights[k];
  }
  for (double x : m.masses) m.total += x;
  return m;
}

double np_mass(const Potential& u) { return finite_window(u.dual()).measure(); }

bool full_mass_test(const BigClass& cls, const Potential& u) {
  return std::abs(np_mass(u) - cls.volume()) <= cls.tol().mass;
}

Potential potential_sum(const Potential& u, const Potential& v) {
  if (!(u.primal_grid() == v.primal_grid())) throw std::invalid_argument("potential_sum: primal grids differ");
  const DualGrid& gu = u.dual_grid();
  const DualGrid& gv = v.dual_grid();
  const int dim = u.dim();
  if (v.dim() != dim) throw std::invalid_argument("potential_sum: dimension mismatch");
  Axis ax[2];
  for (int k = 0; k < dim; ++k) {
    const Axis& a = gu.axis(k);
    const Axis& b = gv.axis(k);
    if (std::abs(a.step - b.step) > 1e-12 * std::max(1.0, std::abs(a.step)))
      throw std::invalid_argument("potential_sum: dual grids are not aligned (spacings differ)");
    ax[k] = {a.origin + b.origin, a.step, a.count + b.count - 1};
  }
  if (dim == 1) ax[1] = {0.0, 1.0, 1};
  DualGrid grid(minkowski_sum(u.body(), v.body()), ax[0], ax[1]);
  DualPotential w{grid, std::vector<double>(grid.size(), kInf), {}};

  const int u0 = gu.axis(0).count;
  const int v0 = gv.axis(0).count;
  const int u1 = dim == 2 ? gu.axis(1).count : 1;
  const int v1 = dim == 2 ? gv.axis(1).count : 1;
  const int s0 = ax[0].count;
  const int rows = u1 + v1 - 1;
  const auto& a = u.dual().values;
  const auto& b = v.dual().values;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < rows; ++r) {
    double* out = w.values.data() + std::size_t(r) * s0;
    for (int ra = std::max(0, r - v1 + 1); ra <= std::min(r, u1 - 1); ++ra) {
      const double* ua = a.data() + std::size_t(ra) * u0;
      const double* vb = b.data() + std::size_t(r - ra) * v0;
      for (int i = 0; i < u0; ++i) {
        if (ua[i] == kInf) continue;
        for (int j = 0; j < v0; ++j) {
          if (vb[j] == kInf) continue;
          out[i + j] = std::min(out[i + j], ua[i] + vb[j]);
        }
      }
    }
  }
  for (std::size_t k = 0; k < w.values.size(); ++k)
    if (!grid.inside(k)) w.values[k] = kInf;
  if (!u.dual().poles.empty() || !v.dual().poles.empty()) {
    for (int r = 0; r < rows; ++r)
      for (int ra = std::max(0, r - v1 + 1); ra <= std::min(r, u1 - 1); ++ra)
        for (int i = 0; i < u0; ++i) {
          if (!u.dual().in_closure(std::size_t(ra) * u0 + i)) continue;
          for (int j = 0; j < v0; ++j) {
            const std::size_t k = std::size_t(r) * s0 + i + j;
            if (w.finite(k) || !v.dual().in_closure(std::size_t(r - ra) * v0 + j)) continue;
            if (std::find(w.poles.begin(), w.poles.end(), k) == w.poles.end()) w.poles.push_back(k);
          }
        }
    std::sort(w.poles.begin(), w.poles.end());
  }

  Potential sum = Potential::from_dual(std::move(w), u.primal_grid(), "sum");
  if (u.tail() && v.tail()) {
    auto ta = u.shared_tail();
    auto tb = v.shared_tail();
    sum = sum.with_tail(std::make_shared<const TailModel>(
        TailModel{[ta, tb](double x) { return ta->value(x) + tb->value(x); },
                  [ta, tb](double x) { return ta->slope(x) + tb->slope(x); },
                  [ta, tb](double x) { return ta->curvature(x) + tb->curvature(x); }}));
  }
  return sum;
}

MixedMass mixed_ma_mass(const Potential& u, const Potential& v) {
  const Potential sum = potential_sum(u, v);
  const double mu = np_mass(u);
  const double mv = np_mass(v);
  const double tu = u.discretization().tolerances().mass;
  const double tv = v.discretization().tolerances().mass;
  MixedMass out;
  out.hypotheses_met = std::abs(mu - u.body().volume()) <= tu && std::abs(mv - v.body().volume()) <= tv;
  out.value = u.dim() == 1 ? 0.5 * np_mass(sum) : 0.5 * (np_mass(sum) - mu - mv);
  return out;
}

double lelong(const Potential& u, End end) {
  if (u.dim() != 1) throw std::invalid_argument("lelong(end) is the n=1 form; use lelong_vertex for polygons");
  const SlopeWindow win = finite_window(u.dual());
  return end == End::zero ? win.lo - u.body().lo() : u.body().hi() - win.hi;
}

double lelong_vertex(const BigClass& cls, const Potential& u, std::size_t vertex) {
  if (u.dim() != 2) throw std::invalid_argument("lelong_vertex needs n=2");
  const Vec2 d = u.body().vertex_direction(vertex);
  const double t0 = 4.0 * u.primal_grid().half_width();
  auto gap = [&](double t) {
    const Vec2 x = t * d;
    return cls.envelope().value_at(x) - u.value_at(x);
  };
  const double f1 = gap(t0);
  const double f2 = gap(2 * t0);
  const double f4 = gap(4 * t0);
  const double s1 = (f2 - f1) / t0;
  const double s2 = (f4 - f2) / (2 * t0);
  return (4.0 * s2 - s1) / 3.0;
}

int mult_ideal_exponent(double t, double nu) {
  if (t < 0 || nu < 0) throw std::invalid_argument("mult_ideal_exponent: t and nu must be nonnegative");
  double x = t * nu - 1.0;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) x = r;
  return std::max(0, int(std::floor(x)) + 1);
}

EnergyReport energy(const BigClass& cls, const Potential& u) {
  EnergyReport rep{0.0, "dual", {}};
  if (!full_mass_test(cls, u)) {
    rep.value = -kInf;
    return rep;
  }
  const DualPotential& vd = cls.envelope().dual();
  bool poles = false;
  for (std::size_t k = 0; k < vd.values.size(); ++k)
    if (vd.finite(k) && !u.dual().finite(k)) poles = true;
  if (poles && chi_energy(cls, u, Weight::identity()) == kInf) {
    rep.value = -kInf;
    return rep;
  }
  rep.value = dual_integral(cls, u.dual());
  rep.terms = {rep.value};
  return rep;
}

EnergyReport energy_cocycle(const BigClass& cls, const Potential& u, const Potential& v) {
  require_same_grids(u, v, "energy_cocycle");
  for (std::size_t k = 0; k < u.dual().values.size(); ++k)
    if (u.dual().finite(k) != v.dual().finite(k)) throw std::invalid_argument("not same singularity type");
  const MaMeasure mu = ma_measure(u);
  const MaMeasure mv = ma_measure(v);
  const auto& a = u.primal().values;
  const auto& b = v.primal().values;
  EnergyReport rep{0.0, "cocycle", {}};
  if (u.dim() == 1) {
    double tu = 0.0;
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      tu += (a[i] - b[i]) * mu.masses[i];
      tv += (a[i] - b[i]) * mv.masses[i];
    }
    rep.terms = {tu / (2 * cls.volume()), tv / (2 * cls.volume())};
  } else {
    const MaMeasure ms = ma_measure(potential_sum(u, v));
    double tu = 0.0;
    double tm = 0.0;
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      tu += d * mu.masses[i];
      tv += d * mv.masses[i];
      tm += d * 0.5 * (ms.masses[i] - mu.masses[i] - mv.masses[i]);
    }
    const double s = 3 * cls.volume();
    rep.terms = {tu / s, tm / s, tv / s};
  }
  for (double t : rep.terms) rep.value += t;
  return rep;
}

Weight Weight::identity() {
  return {"id", [](double t) { return t; }};
}

Weight Weight::power(double p) {
  if (!(p > 0 && p <= 1)) throw std::invalid_argument("power weight needs 0 < p <= 1");
  char buf[32];
  std::snprintf(buf, sizeof buf, "chi_%g", p);
  return {buf, [p](double t) { return -std::pow(-std::min(t, 0.0), p); }};
}

void Weight::validate() const {
  auto fail = [this](const char* why) { throw std::invalid_argument("weight " + name + " is not in W-: " + why); };
  if (std::abs(chi(0.0)) > 1e-12) fail("chi(0) != 0");
  constexpr int kSamples = 4000;
  std::vector<double> t(kSamples + 1);
  std::vector<double> c(kSamples + 1);
  for (int i = 0; i <= kSamples; ++i) {
    t[i] = -1e6 + 1e6 * double(i) / kSamples;
    c[i] = chi(t[i]);
  }
  double scale = 1.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < kSamples; ++i)
    if (c[i + 1] < c[i] - 1e-12 * scale) fail("not increasing");
  for (int i = 1; i < kSamples; ++i)
    if (c[i + 1] - 2 * c[i] + c[i - 1] < -1e-9 * scale) fail("not convex");
  // Fine check near the origin where power weights bend the most.
  for (int e = -6; e < 6; ++e) {
    const double a = -std::pow(10.0, e);
    if (chi(2 * a) - 2 * chi(a) + chi(0.0) < -1e-12 * std::max(1.0, std::abs(chi(2 * a)))) fail("not convex");
  }
  if (!(chi(-1e6) < chi(-1e3) - 1e-6)) fail("chi does not tend to -inf");
}

double chi_energy(const BigClass& cls, const Potential& u, const Weight& weight) {
  weight.validate();
  auto w = [&](double diff) { return -weight.chi(-std::abs(diff)); };
  auto box_sum = [&](const Potential& p, std::vector<double> masses) {
    double s = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i)
      s += w(p.primal().values[i] - class_value(cls, p.primal_grid(), i)) * masses[i];
    return s;
  };

  if (u.dim() == 2) return box_sum(u, ma_measure(u).masses);

  const PrimalGrid& g = u.primal_grid();
  std::vector<double> masses = ma_measure(u).masses;
  if (const TailModel* tail = u.tail()) {
    const auto& v = u.primal().values;
    const int n = g.points();
    const double h = g.spacing();
    const double xl = g.axis().origin;
    const double xr = g.axis().last();
    masses[0] = std::max(0.0, (v[1] - v[0]) / h - tail->slope(xl));
    masses[n - 1] = std::max(0.0, tail->slope(xr) - (v[n - 1] - v[n - 2]) / h);
    auto integrand = [&](double x) {
      const double c = tail->curvature(x);
      return c == 0.0 ? 0.0 : w(tail->value(x) - cls.envelope().value_at({x, 0.0})) * c;
    };
    const TailSum left = doubling_tail(-xl, -1.0, integrand);
    const TailSum right = doubling_tail(xr, 1.0, integrand);
    if (left.divergent || right.divergent) return kInf;
    return box_sum(u, masses) + left.value + right.value;
  }
  if (u.exact_side() == ExactSide::primal) return box_sum(u, masses);

  // L-refinement sweep over boxes L, 2L, 4L at fixed spacing.
  double e[3];
  e[0] = box_sum(u, masses);
  for (int k = 1; k < 3; ++k) {
    const Potential wide = u.on_grid(g.widened(1 << k));
    e[k] = box_sum(wide, ma_measure(wide).masses);
  }
  const double d1 = e[1] - e[0];
  const double d2 = e[2] - e[1];
  if (d2 > 1e-9 * std::max(1.0, std::abs(e[2])) && d2 >= 0.9 * d1) return kInf;
  const double ratio = d1 > 0 ? d2 / d1 : 0.0;
  return ratio > 0 && ratio < 1 ? e[2] + d2 * ratio / (1.0 - ratio) : e[2];
}

CInvariant c_invariant(const BigClass& cls, const Potential& psi) {
  if (psi.dim() != 1) throw std::invalid_argument("c_invariant is implemented for n=1");
  const DualPotential& vd = cls.envelope().dual();
  const DualPotential& pd = psi.dual();
  CInvariant out;
  // Secant: the dual of max(V - t, psi) is the convex envelope of min(V* + t, psi*).
  for (double t = 16.0; t <= 1024.0; t *= 2.0) {
    DualPotential m = vd;
    for (std::size_t k = 0; k < m.values.size(); ++k)
      if (vd.finite(k)) m.values[k] = std::min(vd.values[k] + t, pd.values[k]);
    const double i_t = dual_integral(cls, dual_convexify(m));
    out.shifts.push_back(t);
    out.slopes.push_back(i_t / t);
  }
  const std::size_t n = out.slopes.size();
  out.secant = 2.0 * out.slopes[n - 1] - out.slopes[n - 2];

  DualPotential ind = vd;
  for (std::size_t k = 0; k < ind.values.size(); ++k)
    if (vd.finite(k)) ind.values[k] = pd.finite(k) ? 0.0 : 1.0;
  const DualPotential hull = dual_convexify(ind);
  double integral = 0.0;
  const auto weights = finite_weights(vd);
  for (std::size_t k = 0; k < hull.values.size(); ++k)
    if (vd.finite(k)) integral += weights[k] * hull.values[k];
  out.closed_form = -integral / cls.volume();
  out.value = out.closed_form;
  return out;
}

DominationReport check_domination(const BigClass& cls, const Potential& u, const Potential& v) {
  require_same_grids(u, v, "check_domination");
  const Tolerances tol = cls.tol();
  DominationReport rep;
  const MaMeasure mv = ma_measure(v);
  const auto& a = u.primal().values;
  const auto& b = v.primal().values;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i] + tol.lt) rep.charged_mass += mv.masses[i];
  const bool full = full_mass_test(cls, v);
  rep.hypothesis_met = full && rep.charged_mass <= tol.mass;
  if (!rep.hypothesis_met) {
    rep.message = full ? "hypothesis not met: MA(v) charges {u > v}" : "hypothesis not met: v is not full mass";
    return rep;
  }
  rep.max_excess = -kInf;
  for (std::size_t i = 0; i < a.size(); ++i) {
    rep.max_excess = std::max(rep.max_excess, a[i] - b[i]);
    if (a[i] > b[i] + tol.lt) rep.witnesses.push_back(i);
  }
  rep.holds = rep.witnesses.empty();
  rep.message = rep.holds ? "u <= v holds" : "domination violated";
  return rep;
}

}  // namespace pluri
