#pragma once

#include <span>
#include <vector>

// Discrete Legendre-Fenchel kernels.
//
// conjugate_1d evaluates out[j] = max_i (p[j] * x[i] - f[i]) over the finite f[i],
// with x and p sorted ascending. Ties resolve to the smallest index i. When every
// f[i] is +inf the result is -inf and the arg-max is -1.
//
// conjugate_2d does the same over a tensor grid, f laid out as f[i1 * n0 + i0].
// The flat arg-max index uses the same layout, ties resolved to the smallest flat index.
//
// The `kernels` namespace holds the production versions: a linear-time lower-hull
// sweep per grid line, with lines distributed over OpenMP threads. Each line is
// processed by exactly one thread, so the output does not depend on the thread count.
// The `reference` namespace holds brute-force O(size_in * size_out) versions used by
// tests and the benchmark.

namespace pluri::kernels {

/// Indices of the vertices of the lower convex hull of the finite points, left to right.
std::vector<int> lower_hull(std::span<const double> x, std::span<const double> f);

void conjugate_1d(std::span<const double> x, std::span<const double> f, std::span<const double> p,
                  std::span<double> out, std::span<int> argmax = {});

void conjugate_2d(std::span<const double> x0, std::span<const double> x1, std::span<const double> f,
                  std::span<const double> p0, std::span<const double> p1, std::span<double> out,
                  std::span<int> argmax = {});

/// Lower convex envelope of the finite points evaluated at every x[i] (linear interpolation
/// between hull vertices); +inf where no finite point lies on both sides.
std::vector<double> lower_envelope(std::span<const double> x, std::span<const double> f);

}  // namespace pluri::kernels

namespace pluri::reference {

void conjugate_1d(std::span<const double> x, std::span<const double> f, std::span<const double> p,
                  std::span<double> out, std::span<int> argmax = {});

void conjugate_2d(std::span<const double> x0, std::span<const double> x1, std::span<const double> f,
                  std::span<const double> p0, std::span<const double> p1, std::span<double> out,
                  std::span<int> argmax = {});

}  // namespace pluri::reference
