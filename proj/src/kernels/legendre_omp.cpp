#include <cmath>
#include <limits>
#include <stdexcept>

#include "pluri/kernels.hpp"

namespace pluri::kernels {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Strictly-above test for point c against the chord a-b; collinear middles are dropped.
bool keeps_turn(double xa, double fa, double xb, double fb, double xc, double fc) {
  return (xb - xa) * (fc - fa) - (fb - fa) * (xc - xa) > 0.0;
}

}  // namespace

std::vector<int> lower_hull(std::span<const double> x, std::span<const double> f) {
  std::vector<int> hull;
  hull.reserve(x.size());
  for (int i = 0; i < int(x.size()); ++i) {
    if (!std::isfinite(f[i])) continue;
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull.back();
      if (keeps_turn(x[a], f[a], x[b], f[b], x[i], f[i])) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }
  return hull;
}

void conjugate_1d(std::span<const double> x, std::span<const double> f, std::span<const double> p,
                  std::span<double> out, std::span<int> argmax) {
  const std::vector<int> hull = lower_hull(x, f);
  if (hull.empty()) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      out[j] = -kInf;
      if (!argmax.empty()) argmax[j] = -1;
    }
    return;
  }
  std::size_t k = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    // Advance while the next vertex is strictly better; equality keeps the smaller index.
    while (k + 1 < hull.size()) {
      const int a = hull[k];
      const int b = hull[k + 1];
      if (p[j] * x[b] - f[b] > p[j] * x[a] - f[a]) {
        ++k;
      } else {
        break;
      }
    }
    out[j] = p[j] * x[hull[k]] - f[hull[k]];
    if (!argmax.empty()) argmax[j] = hull[k];
  }
}

void conjugate_2d(std::span<const double> x0, std::span<const double> x1, std::span<const double> f,
                  std::span<const double> p0, std::span<const double> p1, std::span<double> out,
                  std::span<int> argmax) {
  const int n0 = int(x0.size());
  const int n1 = int(x1.size());
  const int m0 = int(p0.size());
  const int m1 = int(p1.size());
  if (f.size() != std::size_t(n0) * n1 || out.size() != std::size_t(m0) * m1)
    throw std::invalid_argument("conjugate_2d: size mismatch");
  const bool track = !argmax.empty();

  // Pass 1: transform every primal row along the first coordinate.
  std::vector<double> rows(std::size_t(n1) * m0);
  std::vector<int> row_arg(track ? std::size_t(n1) * m0 : 0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n1; ++r) {
    std::span<int> arg = track ? std::span<int>(row_arg).subspan(std::size_t(r) * m0, m0) : std::span<int>{};
    conjugate_1d(x0, f.subspan(std::size_t(r) * n0, n0), p0, std::span<double>(rows).subspan(std::size_t(r) * m0, m0),
                 arg);
  }

  // Pass 2: for every first dual coordinate, transform the column of -rows along the second.
#pragma omp parallel
  {
    std::vector<double> column(n1);
    std::vector<double> result(m1);
    std::vector<int> col_arg(track ? m1 : 0);
#pragma omp for schedule(static)
    for (int c = 0; c < m0; ++c) {
      for (int r = 0; r < n1; ++r) {
        const double g = rows[std::size_t(r) * m0 + c];
        column[r] = g == -kInf ? kInf : -g;
      }
      conjugate_1d(x1, column, p1, result, col_arg);
      for (int q = 0; q < m1; ++q) {
        out[std::size_t(q) * m0 + c] = result[q];
        if (track) {
          const int r = col_arg[q];
          argmax[std::size_t(q) * m0 + c] = r < 0 ? -1 : r * n0 + row_arg[std::size_t(r) * m0 + c];
        }
      }
    }
  }
}

std::vector<double> lower_envelope(std::span<const double> x, std::span<const double> f) {
  const std::vector<int> hull = lower_hull(x, f);
  std::vector<double> env(x.size(), kInf);
  if (hull.empty()) return env;
  env[hull[0]] = f[hull[0]];
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    const int a = hull[k];
    const int b = hull[k + 1];
    const double slope = (f[b] - f[a]) / (x[b] - x[a]);
    for (int i = a + 1; i < b; ++i) env[i] = f[a] + slope * (x[i] - x[a]);
    env[b] = f[b];
  }
  return env;
}

}  // namespace pluri::kernels
