#pragma once

// Hand-rolled generators for property tests. Every property loops over a fixed
// number of seeded cases so failures replay exactly; CAPTURE the case index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pluri/presets.hpp"

namespace gen {

inline constexpr int kCases = 100;

inline std::mt19937_64 rng_for(int trial, std::uint64_t salt = 0) {
  std::seed_seq seq{std::uint32_t(trial), std::uint32_t(salt), 0x9e37u};
  return std::mt19937_64(seq);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int integer(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline std::vector<pluri::Vec2> points(std::mt19937_64& rng, int count, double lo, double hi) {
  std::vector<pluri::Vec2> out(count);
  for (auto& p : out) p = {uniform(rng, lo, hi), uniform(rng, lo, hi)};
  return out;
}

/// Convex polygon as the hull of random points, retried until non-degenerate.
inline pluri::SlopeBody polygon(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  for (;;) {
    auto pts = points(rng, integer(rng, 3, 9), lo, hi);
    try {
      auto body = pluri::SlopeBody::hull_of(pts);
      if (body.volume() > 0.05) return body;
    } catch (const pluri::GeometryError&) {
    }
  }
}

/// Ascending distinct abscissae.
inline std::vector<double> sorted(std::mt19937_64& rng, int count, double lo, double hi) {
  std::vector<double> x(count);
  for (auto& v : x) v = uniform(rng, lo, hi);
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  return x;
}

/// Values with a given share of +inf entries.
inline std::vector<double> values(std::mt19937_64& rng, std::size_t count, double inf_share) {
  std::vector<double> f(count);
  for (auto& v : f) v = uniform(rng, 0.0, 1.0) < inf_share ? pluri::kInf : uniform(rng, -3.0, 3.0);
  return f;
}

/// Affine pieces (slope, intercept) with slopes in [lo, hi].
struct Pieces {
  std::vector<double> slope;
  std::vector<double> intercept;

  double operator()(double x) const {
    double v = -pluri::kInf;
    for (std::size_t k = 0; k < slope.size(); ++k) v = std::max(v, slope[k] * x + intercept[k]);
    return v;
  }
  double min_slope() const { return *std::min_element(slope.begin(), slope.end()); }
  double max_slope() const { return *std::max_element(slope.begin(), slope.end()); }
};

inline Pieces pieces(std::mt19937_64& rng, int count, double lo, double hi) {
  Pieces p;
  for (int k = 0; k < count; ++k) {
    p.slope.push_back(uniform(rng, lo, hi));
    p.intercept.push_back(uniform(rng, -2.0, 2.0));
  }
  return p;
}

/// Convex primal samples of a max of affine pieces.
inline pluri::PrimalPotential convex_samples(const pluri::PrimalGrid& grid, const Pieces& p) {
  pluri::PrimalPotential u{grid, std::vector<double>(grid.size()),
                           pluri::SlopeWindow::interval(p.min_slope(), p.max_slope()), true};
  for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = p(grid.point(i).x);
  return u;
}

/// Raw obstacle: a convex base plus Gaussian bumps of either sign.
inline pluri::PrimalPotential bumpy(const pluri::PrimalGrid& grid, const std::vector<double>& base, std::mt19937_64& rng,
                                    int bumps, pluri::SlopeWindow window) {
  pluri::PrimalPotential f{grid, base, std::move(window), false};
  for (int b = 0; b < bumps; ++b) {
    const double a = uniform(rng, -1.0, 1.0), c = uniform(rng, -4.0, 4.0), s = uniform(rng, 0.3, 2.0);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const double x = grid.point(i).x - c;
      f.values[i] += a * std::exp(-x * x / (s * s));
    }
  }
  return f;
}

}  // namespace gen
