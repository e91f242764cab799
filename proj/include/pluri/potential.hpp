#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pluri/grid.hpp"

namespace pluri {

/// Set of slopes a potential realizes at infinity: an interval (n=1) or a convex polygon (n=2).
/// For n=2 the polygon may degenerate to a segment or a point.
struct SlopeWindow {
  int dim = 1;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<Vec2> polygon;

  static SlopeWindow interval(double lo, double hi);
  static SlopeWindow hull_of(std::vector<Vec2> points);
  static SlopeWindow of(const SlopeBody& body);

  bool contains(Vec2 p, double tol) const;
  double measure() const;
  bool empty() const { return dim == 1 ? lo > hi : polygon.empty(); }
};

SlopeWindow intersect(const SlopeWindow& a, const SlopeWindow& b);
SlopeWindow hull_union(const SlopeWindow& a, const SlopeWindow& b);
SlopeWindow minkowski_sum(const SlopeWindow& a, const SlopeWindow& b);

/// Values of a convex function (or a raw obstacle) at the nodes of the box.
struct PrimalPotential {
  PrimalGrid grid;
  std::vector<double> values;
  SlopeWindow window;
  bool convex = false;
};

/// Legendre transform sampled on the dual lattice; +inf marks slopes outside the domain.
struct DualPotential {
  DualGrid grid;
  std::vector<double> values;
  /// Nodes holding +inf that still lie in the closure of the domain, where the
  /// dual blows up at a boundary slope.
  std::vector<std::size_t> poles;

  bool finite(std::size_t k) const { return values[k] != kInf; }
  bool in_closure(std::size_t k) const;
  std::size_t finite_count() const;
};

/// Closed-form primal description on the whole line (n=1), used for tail integrals.
struct TailModel {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::function<double(double)> curvature;
};

enum class ExactSide { primal, dual };

/// A potential held on both sides of the Legendre transform.
///
/// One side is authoritative: for dual-built potentials the primal values are the
/// discrete transform of the stored dual, while for primal-built ones the dual is the
/// box transform restricted to the slope window. Outside the box a primal-built
/// potential continues affinely with its window slopes (n=1).
class Potential {
 public:
  static Potential from_dual(DualPotential w, const PrimalGrid& grid, std::string label = {});
  static Potential from_primal(PrimalPotential u, const DualGrid& grid, std::string label = {});

  const PrimalPotential& primal() const { return primal_; }
  const DualPotential& dual() const { return dual_; }
  const PrimalGrid& primal_grid() const { return primal_.grid; }
  const DualGrid& dual_grid() const { return dual_.grid; }
  const SlopeBody& body() const { return dual_.grid.body(); }
  const SlopeWindow& window() const { return primal_.window; }
  int dim() const { return body().dim(); }
  Discretization discretization() const { return {primal_.grid, dual_.grid}; }
  ExactSide exact_side() const { return side_; }
  const std::string& label() const { return label_; }
  const TailModel* tail() const { return tail_.get(); }

  Potential with_label(std::string label) const;
  Potential with_tail(std::shared_ptr<const TailModel> tail) const;
  std::shared_ptr<const TailModel> shared_tail() const { return tail_; }
  /// u + c, applied exactly on both sides.
  Potential shifted(double c) const;
  /// Value anywhere in R^n through the asymptotic model.
  double value_at(Vec2 x) const;
  /// Same potential re-sampled on a wider box with the same spacing.
  Potential on_grid(const PrimalGrid& grid) const;

 private:
  Potential(PrimalPotential u, DualPotential w, ExactSide side, std::string label)
      : primal_(std::move(u)), dual_(std::move(w)), side_(side), label_(std::move(label)) {}

  PrimalPotential primal_;
  DualPotential dual_;
  ExactSide side_;
  std::string label_;
  std::shared_ptr<const TailModel> tail_;
};

/// Window of a dual over finite and pole nodes: [min, max] (n=1) or their hull (n=2).
SlopeWindow finite_window(const DualPotential& w);

double sup_distance(const PrimalPotential& a, const PrimalPotential& b);

}  // namespace pluri
