#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "pluri/capacity.hpp"
#include "pluri/geodesics.hpp"
#include "pluri/ma_solver.hpp"

namespace pluri::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary dumps: "PLGR", u32 version, u32 kind, u32 dim, then a kind-specific header and
// a payload of little-endian doubles.
//   primal: L, N, window (dim, lo, hi, polygon), convex flag, N^n values
//   dual:   body id, axis0 (origin, step, count), axis1, values
//   curve:  kind name, Lipschitz bound, times, then one primal block per frame
inline constexpr std::uint32_t kFormatVersion = 1;

void write_primal(const std::filesystem::path& path, const PrimalPotential& u);
void write_dual(const std::filesystem::path& path, const DualPotential& w);
void write_curve(const std::filesystem::path& path, const PotentialCurve& curve);

/// Readers take the body: dual dumps store only its identity string, which must match.
PrimalPotential read_primal(const std::filesystem::path& path, const SlopeBody& body);
DualPotential read_dual(const std::filesystem::path& path, const SlopeBody& body);
/// Frames come back as primal-built potentials on `dual`.
PotentialCurve read_curve(const std::filesystem::path& path, const DualGrid& dual);

// CSV tables. Column orders are fixed:
//   curve:      t,energy,sup_to_V
//   sweep:      C,sup_distance,stabilized
//   beta:       beta,dist_to_envelope,monotone_ok,sign_ok,barrier_slack
//   comparison: E_id,cap_P1,cap_P2,T_P1,prop25_bound,prop25_ok,thm26_C
//   measure:    x,mass         (n=1)  or  x,y,mass (n=2)
void write_curve_csv(const std::filesystem::path& path, const BigClass& cls, const PotentialCurve& curve);
void write_sweep_csv(const std::filesystem::path& path, const RwnSweepResult& sweep, double tol);
void write_beta_csv(const std::filesystem::path& path, const BetaSweepReport& report);
void write_comparison_csv(const std::filesystem::path& path, const ComparisonTable& table);
void write_measure_csv(const std::filesystem::path& path, const Potential& u);

/// Shortest round-trip decimal form of a double; "inf" / "-inf" / "nan" for non-finite values.
std::string format_double(double x);

}  // namespace pluri::io
