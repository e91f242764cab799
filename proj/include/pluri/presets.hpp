#pragma once

#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "pluri/potential.hpp"
#include "pluri/transforms.hpp"

namespace pluri {

class UnknownPresetError : public std::invalid_argument {
 public:
  explicit UnknownPresetError(const std::string& name);
};

struct PresetParams {
  double gamma = 0.3;       ///< log_pole: deficiency at the lower end
  double amplitude = 0.3;   ///< wiggle_obstacle: bump height
  double sigma = 1.0;       ///< wiggle_obstacle: bump width
  std::optional<SlopeBody> sub;                    ///< half_body: inner body
  std::optional<std::pair<double, double>> slopes; ///< wiggle_obstacle: slope budget
};

/// Raw obstacles are returned as non-convex primal samples; everything else as a potential.
using PresetValue = std::variant<Potential, PrimalPotential>;

/// Catalog: support_fn, entropy, half_body, inverse_pole, log_pole, wiggle_obstacle.
PresetValue preset(const std::string& name, const PresetParams& params, const Discretization& disc);
/// Potential form of a preset; raw obstacles are replaced by their convex envelope.
Potential preset_potential(const std::string& name, const PresetParams& params, const Discretization& disc);
const std::vector<std::string>& catalog_names();

struct CatalogEntry {
  std::string name;
  std::string slope_set;
  std::string mass;
  std::string lelong;
  std::string energy;
};
/// Reference table for the unit interval body.
std::vector<CatalogEntry> catalog_table();

/// A big class: its slope body, grids, and extremal potential V.
class BigClass {
 public:
  /// V = support function of the body.
  static BigClass toric(const Discretization& disc);
  /// V = convex envelope of the obstacle rho within its slope window.
  static BigClass obstacle(const PrimalPotential& rho, const Discretization& disc);

  const Discretization& disc() const { return disc_; }
  const SlopeBody& body() const { return disc_.dual.body(); }
  const Potential& envelope() const { return envelope_; }
  double volume() const { return volume_; }
  Tolerances tol() const { return disc_.tolerances(); }
  int dim() const { return body().dim(); }

 private:
  BigClass(Discretization disc, Potential v, double volume)
      : disc_(std::move(disc)), envelope_(std::move(v)), volume_(volume) {}
  Discretization disc_;
  Potential envelope_;
  double volume_;
};

/// Max of `pieces` affine functions with slopes drawn from dual nodes (n=1).
Potential random_piecewise_affine(const Discretization& disc, std::mt19937_64& rng, int pieces);
/// Smooth strictly convex dual finite on every node of the body (n=2).
Potential random_full_mass(const Discretization& disc, std::mt19937_64& rng);

}  // namespace pluri
