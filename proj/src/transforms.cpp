#include "pluri/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "pluri/kernels.hpp"

namespace pluri {
namespace {

double window_tol(const DualGrid& g) { return 1e-9 * std::max(1.0, g.body().diameter()); }

void mask_outside(DualPotential& w, const SlopeWindow& window) {
  const double tol = window_tol(w.grid);
  for (std::size_t k = 0; k < w.values.size(); ++k)
    if (!w.grid.inside(k) || !window.contains(w.grid.point(k), tol)) w.values[k] = kInf;
}

std::vector<double> dual_transform(const PrimalGrid& g, std::span<const double> f, const DualGrid& d) {
  std::vector<double> out(d.size());
  const std::vector<double> x = g.axis().nodes();
  if (g.dim() == 1) {
    kernels::conjugate_1d(x, f, d.axis(0).nodes(), out);
  } else {
    kernels::conjugate_2d(x, x, f, d.axis(0).nodes(), d.axis(1).nodes(), out);
  }
  return out;
}

}  // namespace

DualPotential legendre_to_dual(const PrimalPotential& u, const DualGrid& grid) {
  if (!u.convex) throw NotConvexError();
  if (u.grid.dim() != grid.dim()) throw std::invalid_argument("legendre_to_dual: dimension mismatch");
  DualPotential w{grid, dual_transform(u.grid, u.values, grid), {}};
  mask_outside(w, u.window);
  return w;
}

PrimalPotential legendre_to_primal(const DualPotential& w, const PrimalGrid& grid) {
  if (w.finite_count() == 0) throw EmptyClassError();
  PrimalPotential u{grid, std::vector<double>(grid.size()), finite_window(w), true};
  const std::vector<double> x = grid.axis().nodes();
  if (grid.dim() == 1) {
    kernels::conjugate_1d(w.grid.axis(0).nodes(), w.values, x, u.values);
  } else {
    kernels::conjugate_2d(w.grid.axis(0).nodes(), w.grid.axis(1).nodes(), w.values, x, x, u.values);
  }
  return u;
}

PrimalPotential convex_envelope(const PrimalPotential& f, const DualGrid& grid) {
  for (double v : f.values)
    if (!std::isfinite(v)) throw std::invalid_argument("convex_envelope: obstacle must be finite on the grid");
  if (f.window.empty()) throw std::invalid_argument("convex_envelope: empty slope window");

  if (f.grid.dim() == 2) {
    DualPotential w{grid, dual_transform(f.grid, f.values, grid), {}};
    mask_outside(w, f.window);
    if (w.finite_count() == 0) throw EmptyClassError();
    return legendre_to_primal(w, f.grid);
  }

  // n=1: lower hull, then continue affinely with the window slopes past the
  // vertices where the hull slope leaves [lo, hi].
  const std::vector<double> x = f.grid.axis().nodes();
  const double ends[2] = {f.window.lo, f.window.hi};
  double val[2];
  int arg[2];
  kernels::conjugate_1d(x, f.values, ends, val, arg);
  std::vector<double> g = kernels::lower_envelope(x, f.values);
  const int a = arg[0];
  // For the right end the last maximizer is wanted; walk forward over ties.
  int b = arg[1];
  for (int i = b + 1; i < int(x.size()); ++i)
    if (ends[1] * x[i] - f.values[i] >= val[1]) b = i;
  for (int i = 0; i < a; ++i) g[i] = f.values[a] + ends[0] * (x[i] - x[a]);
  for (int i = b + 1; i < int(x.size()); ++i) g[i] = f.values[b] + ends[1] * (x[i] - x[b]);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::min(g[i], f.values[i]);
  return {f.grid, std::move(g), f.window, true};
}

ConvexityReport is_convex(const PrimalPotential& f, double slack) {
  double scale = 1.0;
  for (double v : f.values) scale = std::max(scale, std::abs(v));
  if (slack < 0) slack = 1e-9 * scale;
  ConvexityReport rep;
  auto visit = [&](std::size_t l, std::size_t c, std::size_t r) {
    const double d2 = f.values[l] - 2.0 * f.values[c] + f.values[r];
    if (-d2 > rep.worst_violation) {
      rep.worst_violation = -d2;
      rep.location = c;
    }
  };
  const int n = f.grid.points();
  if (f.grid.dim() == 1) {
    for (int i = 1; i + 1 < n; ++i) visit(i - 1, i, i + 1);
  } else {
    auto at = [n](int i, int j) { return std::size_t(j) * n + i; };
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (i > 0 && i + 1 < n) visit(at(i - 1, j), at(i, j), at(i + 1, j));
        if (j > 0 && j + 1 < n) visit(at(i, j - 1), at(i, j), at(i, j + 1));
        if (i > 0 && j > 0 && i + 1 < n && j + 1 < n) {
          visit(at(i - 1, j - 1), at(i, j), at(i + 1, j + 1));
          visit(at(i - 1, j + 1), at(i, j), at(i + 1, j - 1));
        }
      }
  }
  rep.ok = rep.worst_violation <= slack;
  return rep;
}

DualPotential dual_convexify(const DualPotential& w) {
  if (w.grid.dim() != 1) throw std::invalid_argument("dual convexification is implemented for n=1");
  return {w.grid, kernels::lower_envelope(w.grid.axis(0).nodes(), w.values), {}};
}

DualPotential dual_max(const DualPotential& a, const DualPotential& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("dual_max: grid mismatch");
  DualPotential out = a;
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = std::max(a.values[k], b.values[k]);
  return out;
}

}  // namespace pluri
