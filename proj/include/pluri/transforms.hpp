#pragma once

#include <string>

#include "pluri/potential.hpp"

namespace pluri {

class NotConvexError : public std::invalid_argument {
 public:
  NotConvexError() : std::invalid_argument("not convex: run convex_envelope first") {}
};

class EmptyClassError : public std::invalid_argument {
 public:
  EmptyClassError() : std::invalid_argument("empty class representative") {}
};

/// u*(p) = sup_x (<p,x> - u(x)) at every dual node inside the window; +inf elsewhere.
DualPotential legendre_to_dual(const PrimalPotential& u, const DualGrid& grid);

/// u(x) = max over finite dual nodes of (<p,x> - w(p)); window from the finite nodes.
PrimalPotential legendre_to_primal(const DualPotential& w, const PrimalGrid& grid);

/// Largest convex function below f on the box whose slopes lie in f.window.
/// n=1 is exact (slope-clamped lower hull); n=2 is the double transform through `grid`.
PrimalPotential convex_envelope(const PrimalPotential& f, const DualGrid& grid);

struct ConvexityReport {
  bool ok = true;
  double worst_violation = 0.0;
  std::size_t location = 0;
};

/// Scans axis and diagonal second differences; violations are reported unscaled.
ConvexityReport is_convex(const PrimalPotential& f, double slack = -1.0);

/// Lower convex envelope of the finite dual nodes (n=1); +inf outside their span.
DualPotential dual_convexify(const DualPotential& w);

/// Node-wise max with the +inf algebra.
DualPotential dual_max(const DualPotential& a, const DualPotential& b);

}  // namespace pluri
