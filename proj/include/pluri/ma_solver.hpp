#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pluri/ma_calculus.hpp"

namespace pluri {

/// Raw obstacle rho with its slope budget and the positive part of its MA density.
struct ObstacleModel {
  PrimalPotential rho;        ///< raw samples; window = slope budget [s-, s+]
  DualGrid grid;              ///< slopes of the body
  std::vector<double> density;  ///< nodal masses of max(rho'', 0), end nodes against the budget
  PrimalPotential envelope;   ///< convex envelope of rho within the budget

  /// n = 1 only.
  static ObstacleModel from(const PrimalPotential& rho, const DualGrid& grid);
  double budget() const { return rho.window.hi - rho.window.lo; }
  double total_density() const;
};

struct NewtonConfig {
  int max_iter = 100;
  double backtrack = 0.5;
  double residual_scale = 1e-10;  ///< target = residual_scale * budget
  int polish_steps = 8;
};

struct SolveConfig {
  double beta = 1.0;
  NewtonConfig newton;
};

enum class SolverStart { envelope_minus_inverse_beta, envelope_minus_one };

struct SolveResult {
  PrimalPotential u;
  int iterations = 0;
  double residual = 0.0;           ///< final max-norm residual
  double target = 0.0;             ///< residual target
  std::vector<double> trace;       ///< 2-norm residual, initial and after each accepted step
};

class SolverStagnation : public std::runtime_error {
 public:
  SolverStagnation(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Node-wise residual MA(u) - exp(beta (u - rho)) density.
std::vector<double> exp_ma_residual(const ObstacleModel& model, const std::vector<double>& u, double beta);

/// Damped Newton for MA(u) = exp(beta (u - rho)) density with slopes pinned to the budget.
SolveResult solve_exp_ma(const ObstacleModel& model, const SolveConfig& cfg,
                         SolverStart start = SolverStart::envelope_minus_inverse_beta);

struct BetaRow {
  double beta = 0.0;
  double dist_to_envelope = 0.0;
  bool monotone_ok = true;   ///< u_beta >= u_previous - tol
  bool sign_ok = true;       ///< u_beta <= rho + tol
  double barrier_slack = 0.0;  ///< min of u_beta - ((1 - 1/beta) E + u_1 / beta - log(beta) / beta - tol)
  int iterations = 0;
  double residual = 0.0;
};

struct BetaSweepReport {
  std::vector<BetaRow> rows;
  double tol = 0.0;
  bool all_ok() const;
};

/// 1, 2, 4, ..., up to `max_beta`.
std::vector<double> beta_ladder(double max_beta);
BetaSweepReport beta_sweep(const ObstacleModel& model, std::span<const double> betas, const NewtonConfig& newton = {});

struct ContactReport {
  double off_contact_mass = 0.0;
  double max_density_excess = 0.0;  ///< max over contact nodes of MA(E) - density
  std::size_t contact_nodes = 0;
  double lelong_zero = 0.0;         ///< slope deficiency of the envelope at the lower end
  double lelong_infinity = 0.0;
  bool ok = true;
};
ContactReport contact_check(const ObstacleModel& model, const Tolerances& tol);

/// F(u) = (Phi(u) - Phi(E)) / Vol - (1 / (beta Vol)) sum exp(beta (u - rho)) density, with
/// Phi(u) = -(1/2h) sum (u[i+1] - u[i])^2 - s- u[0] + s+ u[N-1] the discrete energy whose
/// gradient is the nodal MA measure.
double variational_F(const std::vector<double>& u, const ObstacleModel& model, double beta);

}  // namespace pluri
