#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pluri/envelopes.hpp"
#include "pluri/ma_calculus.hpp"

namespace pluri {

/// Node mask over the primal grid.
using NodeSet = std::vector<std::uint8_t>;

struct NamedSet {
  std::string id;
  NodeSet nodes;
};

/// Mass that MA(h) puts on E, for h the envelope of min(V off E, V - 1 on E).
double capacity(const NodeSet& set, const BigClass& cls);

/// Largest mass on E over `samples` random band potentials max(V - 1, a_1, ..., a_k), k <= 5,
/// with affine a_j lying below V.
double capacity_oracle(const NodeSet& set, const BigClass& cls, std::mt19937_64& rng, int samples = 500);

struct AlexanderTaylor {
  double m = 0.0;  ///< sup of the extremal function
  double t = 1.0;  ///< exp(-m)
};
AlexanderTaylor alexander_taylor(const NodeSet& set, const BigClass& cls);

struct CapacityReport {
  NodeSet set;
  double cap = 0.0;
  double m = 0.0;
  double t = 1.0;
};
CapacityReport capacity_report(const NodeSet& set, const BigClass& cls);

struct ComparisonRow {
  std::string id;
  double cap1 = 0.0;
  double cap2 = 0.0;
  double t1 = 1.0;
  double prop25_bound = 0.0;  ///< e * exp(-(Vol / cap1)^(1/n))
  bool prop25_ok = true;      ///< t1 <= bound + tol_mass
  double thm26_c = 0.0;       ///< max(cap1^n / cap2, cap2 / cap1^(1/n))
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  double c_min = 0.0;
  double c_max = 0.0;
  bool c_bounded = true;  ///< c_max / c_min <= 1e3
  bool all_ok() const;
};

/// Both classes must share the primal grid.
ComparisonTable comparison_experiment(const BigClass& first, const BigClass& second, const std::vector<NamedSet>& family);

/// Closed disc of radius r about c on the primal grid (n=2), or the interval [c.x - r, c.x + r] (n=1).
NodeSet ball_set(const PrimalGrid& grid, Vec2 centre, double radius);
/// `count` discs about `centre` with radii spaced evenly in [r_min, r_max].
std::vector<NamedSet> disc_family(const PrimalGrid& grid, Vec2 centre, double r_min, double r_max, int count);

}  // namespace pluri
