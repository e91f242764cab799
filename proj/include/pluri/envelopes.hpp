#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pluri/presets.hpp"

namespace pluri {

/// Largest admissible convex function below the raw obstacle f.
Potential project(const PrimalPotential& f, const DualGrid& grid);

/// Envelope of min(u, v), computed on the primal side.
Potential rooftop(const Potential& u, const Potential& v);
/// Dual fast path: the potential whose transform is max(u*, v*).
Potential rooftop_dual(const Potential& u, const Potential& v);

/// t u + (1 - t) v on the primal side (n=1); the slope window and any tails blend the same way.
Potential convex_combination(const Potential& u, const Potential& v, double t);

struct RwnStep {
  double shift;
  double sup_distance;
};

struct RwnSweepResult {
  Potential limit;
  std::vector<RwnStep> sweep;
  bool stabilized = false;
  bool monotone = true;
  /// Dual-side prediction: phi* on the finite nodes of psi*, +inf elsewhere.
  Potential prediction;
  double prediction_error = 0.0;
};

/// 1, 2, 4, ... up to and including `cap`.
std::vector<double> geometric_schedule(double cap);

/// Sweep rooftop(phi, psi + C) over the schedule; default cap 2^14 * max(1, sup|phi - psi|).
RwnSweepResult rwn_envelope(const Potential& phi, const Potential& psi, std::span<const double> schedule = {});

struct ExtremalResult {
  Potential extremal;
  double sup_excess;  ///< M_E
};

/// Extremal function of the node set E (mask over primal nodes) relative to the class envelope.
ExtremalResult extremal_function(const std::vector<std::uint8_t>& set, const BigClass& cls);

}  // namespace pluri
