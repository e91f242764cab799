#include <cmath>
#include <limits>
#include <stdexcept>

#include "pluri/kernels.hpp"

namespace pluri::reference {

void conjugate_1d(std::span<const double> x, std::span<const double> f, std::span<const double> p,
                  std::span<double> out, std::span<int> argmax) {
  for (std::size_t j = 0; j < p.size(); ++j) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = -1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(f[i])) continue;
      const double v = p[j] * x[i] - f[i];
      if (arg < 0 || v > best) {
        best = v;
        arg = int(i);
      }
    }
    out[j] = best;
    if (!argmax.empty()) argmax[j] = arg;
  }
}

void conjugate_2d(std::span<const double> x0, std::span<const double> x1, std::span<const double> f,
                  std::span<const double> p0, std::span<const double> p1, std::span<double> out,
                  std::span<int> argmax) {
  const std::size_t n0 = x0.size();
  const std::size_t m0 = p0.size();
  if (f.size() != n0 * x1.size() || out.size() != m0 * p1.size())
    throw std::invalid_argument("conjugate_2d: size mismatch");
  for (std::size_t q = 0; q < p1.size(); ++q) {
    for (std::size_t c = 0; c < m0; ++c) {
      double best = -std::numeric_limits<double>::infinity();
      int arg = -1;
      for (std::size_t r = 0; r < x1.size(); ++r) {
        for (std::size_t i = 0; i < n0; ++i) {
          const double fv = f[r * n0 + i];
          if (!std::isfinite(fv)) continue;
          const double v = p0[c] * x0[i] + p1[q] * x1[r] - fv;
          if (arg < 0 || v > best) {
            best = v;
            arg = int(r * n0 + i);
          }
        }
      }
      out[q * m0 + c] = best;
      if (!argmax.empty()) argmax[q * m0 + c] = arg;
    }
  }
}

}  // namespace pluri::reference
