#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pluri/presets.hpp"

namespace pluri {

/// Discrete Monge-Ampere measure: masses at primal nodes.
struct MaMeasure {
  std::vector<double> masses;
  double total = 0.0;
};

/// n=1: slope increments, end nodes measured against the window slopes.
/// n=2: each dual node's quadrature weight goes to the primal arg-max node.
MaMeasure ma_measure(const Potential& u);

/// Lebesgue measure of the finite domain of u*.
double np_mass(const Potential& u);
bool full_mass_test(const BigClass& cls, const Potential& u);

/// u + v on the Minkowski-sum body; the dual is the discrete inf-convolution.
/// Both dual grids must share their spacing.
Potential potential_sum(const Potential& u, const Potential& v);

struct MixedMass {
  double value = 0.0;
  bool hypotheses_met = true;
};
MixedMass mixed_ma_mass(const Potential& u, const Potential& v);

enum class End { zero, infinity };
/// n=1 Lelong number at an end of the body, read from the finite dual domain.
double lelong(const Potential& u, End end);
/// n=2 Lelong number at a vertex of the body, by Richardson extrapolation of the
/// growth of V - u along the vertex direction at t = T, 2T, 4T with T = 4L.
double lelong_vertex(const BigClass& cls, const Potential& u, std::size_t vertex);

/// Least integer k >= 0 with k > t * nu - 1.
int mult_ideal_exponent(double t, double nu);

struct EnergyReport {
  double value = 0.0;  ///< -inf when the potential has infinite energy
  std::string method;  ///< "dual" or "cocycle"
  std::vector<double> terms;
};

/// I(u) = (1/Vol) * integral over P of (V* - u*).
EnergyReport energy(const BigClass& cls, const Potential& u);
/// I(u) - I(v) through the mixed Monge-Ampere measures.
EnergyReport energy_cocycle(const BigClass& cls, const Potential& u, const Potential& v);

/// Increasing convex weight with chi(0) = 0 and chi(-inf) = -inf.
struct Weight {
  std::string name;
  std::function<double(double)> chi;

  static Weight identity();
  /// chi(t) = -(-t)^p, 0 < p <= 1.
  static Weight power(double p);
  /// Throws when the sampled checks on [-1e6, 0] fail.
  void validate() const;
};

/// Integral of (-chi)(-|u - V|) against MA(u); +inf when the tail diverges.
/// Tail outside the box: closed-form model when attached, else an L-refinement sweep
/// for dual-built potentials; primal-built ones continue affinely and carry no tail.
double chi_energy(const BigClass& cls, const Potential& u, const Weight& weight);

struct CInvariant {
  double secant = 0.0;        ///< Richardson limit of I(max(V - t, psi)) / t
  double closed_form = 0.0;   ///< -(1/Vol) * integral of conv(indicator of the missing slopes)
  double value = 0.0;
  std::vector<double> shifts;
  std::vector<double> slopes;
};
CInvariant c_invariant(const BigClass& cls, const Potential& psi);

struct DominationReport {
  bool hypothesis_met = false;
  bool holds = true;
  double charged_mass = 0.0;
  double max_excess = 0.0;
  std::vector<std::size_t> witnesses;
  std::string message;
};
DominationReport check_domination(const BigClass& cls, const Potential& u, const Potential& v);

}  // namespace pluri
