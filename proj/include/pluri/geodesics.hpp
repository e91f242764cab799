#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pluri/ma_calculus.hpp"

namespace pluri {

enum class CurveKind { subgeodesic, geodesic, ray };
std::string to_string(CurveKind kind);

/// A family of potentials sampled on a uniform time grid.
struct PotentialCurve {
  std::vector<double> times;
  std::vector<Potential> frames;
  CurveKind kind = CurveKind::subgeodesic;
  double lipschitz = 0.0;   ///< t-Lipschitz bound carried by the construction
  bool stabilized = true;   ///< rays: every frame settled along the l-schedule
  std::vector<double> l_schedule;

  std::size_t size() const { return frames.size(); }
  double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Sup distance between the two endpoints over the whole space, read on the dual side
/// (the transform is a sup-norm isometry). Throws when the finite dual domains differ.
double endpoint_distance(const Potential& u0, const Potential& u1);

/// Frame duals are (1 - t) u0* + t u1*; endpoint frames are the inputs.
PotentialCurve geodesic_segment(const Potential& u0, const Potential& u1, int intervals);

/// Independent primal construction (n = 1): the convex envelope over the (x, t) box of the
/// endpoint data, with t-slopes in [-C, C] for C the endpoint distance.
PotentialCurve hmae_envelope_segment(const Potential& u0, const Potential& u1, int intervals,
                                     int t_slope_nodes = 257);

/// max(u0 - C t, u1 + C (t - 1)).
PotentialCurve barrier_subgeodesic(const Potential& u0, const Potential& u1, int intervals);

/// Convolution in t with the bump (1 - s^2)^3 of half-width eps; keeps the nodes in [eps, 1 - eps].
PotentialCurve mollify_time(const PotentialCurve& curve, double eps);

/// Frame-wise sup distance between two curves on the same time grid.
double curve_distance(const PotentialCurve& a, const PotentialCurve& b);

/// Geodesic ray toward the singularity type of psi (n = 1) on t in [0, horizon].
/// Each l in the schedule (default: geometric up to 2^14 * max(1, gap), the gap being the
/// larger of the box and dual-side distances between phi and psi) gives the segment from
/// phi to max(phi - l, psi) read at t; the ray is the last one.
PotentialCurve geodesic_ray(const Potential& phi, const Potential& psi, double horizon, int intervals,
                            std::span<const double> l_schedule = {});

struct LegendreSlice {
  std::optional<Potential> potential;  ///< empty when the infimum is -inf everywhere
  std::size_t unbounded_nodes = 0;     ///< dual nodes whose sup ran to the last frame
  bool minus_infinity = false;
};
/// inf over frames of (v_t - t tau), through its transform sup_t (v_t* + t tau).
LegendreSlice ray_time_legendre(const PotentialCurve& ray, double tau);

struct EnergyAlongReport {
  std::vector<double> values;
  std::vector<double> secant_slopes;
  std::vector<double> second_differences;
  double min_second_difference = 0.0;
  double chord_deviation = 0.0;
  bool convex = true;
  bool linear = true;
};
EnergyAlongReport energy_along(const BigClass& cls, const PotentialCurve& curve);

struct DerivativeReport {
  std::vector<double> times;
  std::vector<double> first_fd;
  std::vector<double> first_formula;
  std::vector<double> second_fd;
  std::vector<double> second_formula;
  double first_rel_error = 0.0;
  double second_rel_error = 0.0;
  int stride = 0;
};
/// Finite differences of I along a mollified curve against the integral formulas
/// dI/dt = (1/Vol) sum (du/dt) dMA(u) and
/// d2I/dt2 = (1/Vol) [sum (d2u/dt2) dMA(u) - integral over the box of (d/dx du/dt)^2].
/// The source time grid must have at least 64 intervals.
DerivativeReport derivative_check(const BigClass& cls, const PotentialCurve& mollified, int source_intervals);

}  // namespace pluri
