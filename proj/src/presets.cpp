#include "pluri/presets.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace pluri {
namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }
double xlogx(double t) { return t <= 0 ? 0.0 : t * std::log(t); }

std::string join_catalog() {
  std::string s;
  for (const auto& n : catalog_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

DualPotential dual_from(const DualGrid& grid, auto&& fn) {
  DualPotential w{grid, std::vector<double>(grid.size(), kInf), {}};
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (grid.inside(k)) w.values[k] = fn(grid.point(k));
  return w;
}

std::shared_ptr<const TailModel> interval_entropy_tail(double lo, double hi) {
  const double w = hi - lo;
  return std::make_shared<const TailModel>(TailModel{
      [=](double x) { return lo * x + w * softplus(x); },
      [=](double x) { return lo + w * sigmoid(x); },
      [=](double x) {
        const double s = sigmoid(x);
        return w * s * (1.0 - s);
      }});
}

std::shared_ptr<const TailModel> support_tail(double lo, double hi) {
  return std::make_shared<const TailModel>(TailModel{[=](double x) { return std::max(lo * x, hi * x); },
                                                     [=](double x) { return x < 0 ? lo : hi; },
                                                     [](double) { return 0.0; }});
}

// Edge data of a ccw polygon: outward unit normal n and offset c with <n,p> <= c inside.
struct Edge {
  Vec2 normal;
  double offset;
};

std::vector<Edge> edges_of(const SlopeBody& body) {
  std::vector<Edge> out;
  const auto& v = body.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 e = v[(i + 1) % v.size()] - v[i];
    const Vec2 n{e.y / norm(e), -e.x / norm(e)};
    out.push_back({n, dot(n, v[i])});
  }
  return out;
}

double guillemin(const std::vector<Edge>& edges, Vec2 p) {
  double s = 0.0;
  for (const Edge& e : edges) s += xlogx(std::max(0.0, e.offset - dot(e.normal, p)));
  return s;
}

SlopeBody default_sub(const SlopeBody& body) {
  if (body.dim() == 1) {
    const double w = body.hi() - body.lo();
    return SlopeBody::interval(body.lo() + 0.25 * w, body.hi() - 0.25 * w);
  }
  Vec2 c{0, 0};
  for (Vec2 v : body.vertices()) c = c + v;
  c = (1.0 / body.vertices().size()) * c;
  std::vector<Vec2> inner;
  for (Vec2 v : body.vertices()) inner.push_back(c + 0.5 * (v - c));
  return SlopeBody::polygon(inner);
}

}  // namespace

UnknownPresetError::UnknownPresetError(const std::string& name)
    : std::invalid_argument("unknown preset '" + name + "'; catalog: " + join_catalog()) {}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"support_fn", "entropy",  "half_body",
                                                 "inverse_pole", "log_pole", "wiggle_obstacle"};
  return names;
}

PresetValue preset(const std::string& name, const PresetParams& params, const Discretization& disc) {
  const DualGrid& grid = disc.dual;
  const SlopeBody& body = grid.body();
  const double tol = 1e-9 * std::max(1.0, body.diameter());
  auto one_dim_only = [&] {
    if (body.dim() != 1) throw std::invalid_argument("preset '" + name + "' is defined for n=1 only");
  };

  if (name == "support_fn") {
    auto p = Potential::from_dual(dual_from(grid, [](Vec2) { return 0.0; }), disc.primal, name);
    return body.dim() == 1 ? p.with_tail(support_tail(body.lo(), body.hi())) : p;
  }
  if (name == "entropy") {
    if (body.dim() == 2) {
      const auto edges = edges_of(body);
      return Potential::from_dual(dual_from(grid, [&](Vec2 p) { return guillemin(edges, p); }), disc.primal, name);
    }
    const double a = body.lo();
    const double b = body.hi();
    const double w = b - a;
    auto dual = dual_from(grid, [=](Vec2 p) {
      const double q = std::clamp(p.x, a, b);
      return xlogx(q - a) + xlogx(b - q) - w * std::log(w);
    });
    return Potential::from_dual(std::move(dual), disc.primal, name).with_tail(interval_entropy_tail(a, b));
  }
  if (name == "half_body") {
    const SlopeBody sub = params.sub ? *params.sub : default_sub(body);
    if (sub.dim() != body.dim()) throw std::invalid_argument("half_body: sub-body dimension mismatch");
    auto dual = dual_from(grid, [&](Vec2 p) { return sub.contains(p, tol) ? 0.0 : kInf; });
    auto p = Potential::from_dual(std::move(dual), disc.primal, name);
    return body.dim() == 1 ? p.with_tail(support_tail(sub.lo(), sub.hi())) : p;
  }
  if (name == "inverse_pole") {
    one_dim_only();
    const double a = body.lo();
    const double w = body.hi() - a;
    auto dual = dual_from(grid, [=](Vec2 p) { return p.x - a <= tol ? kInf : 1.0 / (p.x - a) - 1.0 / w; });
    for (std::size_t k = 0; k < dual.values.size(); ++k)
      if (!dual.finite(k) && std::abs(grid.point(k).x - a) <= tol) dual.poles.push_back(k);
    // Closed form: a x + (x <= -1/w^2 ? 1/w - 2 sqrt(-x) : w x).
    const double knee = -1.0 / (w * w);
    auto tail = std::make_shared<const TailModel>(TailModel{
        [=](double x) { return a * x + (x <= knee ? 1.0 / w - 2.0 * std::sqrt(-x) : w * x); },
        [=](double x) { return a + (x <= knee ? 1.0 / std::sqrt(-x) : w); },
        [=](double x) { return x < knee ? 0.5 * std::pow(-x, -1.5) : 0.0; }});
    return Potential::from_dual(std::move(dual), disc.primal, name).with_tail(tail);
  }
  if (name == "log_pole") {
    one_dim_only();
    const double a = body.lo() + params.gamma;
    const double b = body.hi();
    if (!(params.gamma >= 0 && a < b)) throw std::invalid_argument("log_pole: gamma must lie in [0, width)");
    const double w = b - a;
    auto dual = dual_from(grid, [=](Vec2 p) {
      if (p.x < a - tol) return kInf;
      const double q = std::clamp(p.x, a, b);
      return xlogx(q - a) + xlogx(b - q) - w * std::log(w);
    });
    return Potential::from_dual(std::move(dual), disc.primal, name).with_tail(interval_entropy_tail(a, b));
  }
  if (name == "wiggle_obstacle") {
    one_dim_only();
    const auto [lo, hi] = params.slopes.value_or(std::pair{body.lo(), body.hi()});
    if (!(lo < hi) || lo < body.lo() - tol || hi > body.hi() + tol)
      throw std::invalid_argument("wiggle_obstacle: slope budget must be a sub-interval of the body");
    PrimalPotential rho{disc.primal, std::vector<double>(disc.primal.size()), SlopeWindow::interval(lo, hi), false};
    const double s2 = params.sigma * params.sigma;
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
      const double x = disc.primal.point(i).x;
      rho.values[i] = lo * x + (hi - lo) * softplus(x) + params.amplitude * std::exp(-x * x / s2);
    }
    return rho;
  }
  throw UnknownPresetError(name);
}

Potential preset_potential(const std::string& name, const PresetParams& params, const Discretization& disc) {
  PresetValue v = preset(name, params, disc);
  if (auto* p = std::get_if<Potential>(&v)) return *p;
  return Potential::from_primal(convex_envelope(std::get<PrimalPotential>(v), disc.dual), disc.dual, name);
}

std::vector<CatalogEntry> catalog_table() {
  return {
      {"support_fn", "[0,1]", "1", "0 / 0", "0"},
      {"entropy", "[0,1]", "1", "0 / 0", "1/2"},
      {"half_body", "[1/4,3/4]", "1/2", "1/4 / 1/4", "-inf (not full mass)"},
      {"inverse_pole", "(0,1]", "1", "0 / 0", "-inf (full mass, not in E^1)"},
      {"log_pole(g)", "[g,1]", "1-g", "g / 0", "-inf (not full mass)"},
      {"wiggle_obstacle(a,s)", "[0,1] (after projection)", "1", "0 / 0", "finite"},
  };
}

BigClass BigClass::toric(const Discretization& disc) {
  Potential v = preset_potential("support_fn", {}, disc).with_label("V");
  return BigClass(disc, std::move(v), disc.dual.body().volume());
}

BigClass BigClass::obstacle(const PrimalPotential& rho, const Discretization& disc) {
  Potential v = Potential::from_primal(convex_envelope(rho, disc.dual), disc.dual, "V");
  const double vol = finite_window(v.dual()).measure();
  if (!(vol > 0)) throw std::invalid_argument("obstacle class has zero volume");
  return BigClass(disc, std::move(v), vol);
}

Potential random_piecewise_affine(const Discretization& disc, std::mt19937_64& rng, int pieces) {
  if (disc.primal.dim() != 1) throw std::invalid_argument("random_piecewise_affine is defined for n=1");
  const int m = disc.dual.points();
  std::uniform_int_distribution<int> node(0, m - 1);
  std::uniform_real_distribution<double> offset(-2.0, 2.0);
  std::vector<int> slopes;
  while (int(slopes.size()) < pieces) {
    const int k = node(rng);
    if (std::find(slopes.begin(), slopes.end(), k) == slopes.end()) slopes.push_back(k);
  }
  std::sort(slopes.begin(), slopes.end());
  std::vector<double> c(pieces);
  for (double& v : c) v = offset(rng);
  PrimalPotential u{disc.primal, std::vector<double>(disc.primal.size(), -kInf), {}, true};
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double x = disc.primal.point(i).x;
    for (int j = 0; j < pieces; ++j) u.values[i] = std::max(u.values[i], disc.dual.point(slopes[j]).x * x + c[j]);
  }
  u.window = SlopeWindow::interval(disc.dual.point(slopes.front()).x, disc.dual.point(slopes.back()).x);
  return Potential::from_primal(std::move(u), disc.dual, "random_pl");
}

Potential random_full_mass(const Discretization& disc, std::mt19937_64& rng) {
  if (disc.dual.dim() != 2) throw std::invalid_argument("random_full_mass is defined for n=2");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double alpha = 0.2 + 0.8 * unit(rng);
  const double a11 = 0.5 * unit(rng);
  const double a22 = 0.5 * unit(rng);
  const double a12 = 0.9 * std::sqrt(a11 * a22) * (2.0 * unit(rng) - 1.0);
  const Vec2 lin{2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0};
  const auto edges = edges_of(disc.dual.body());
  auto dual = dual_from(disc.dual, [&](Vec2 p) {
    return alpha * guillemin(edges, p) + 0.5 * (a11 * p.x * p.x + 2 * a12 * p.x * p.y + a22 * p.y * p.y) + dot(lin, p);
  });
  return Potential::from_dual(std::move(dual), disc.primal, "random_full_mass");
}

}  // namespace pluri
