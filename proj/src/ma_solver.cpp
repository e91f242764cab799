#include "pluri/ma_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace pluri {
namespace {

// Nodal MA measure of grid values: second differences inside, slopes against the
// budget at the two ends.
std::vector<double> nodal_ma(const std::vector<double>& u, double h, double lo, double hi) {
  const std::size_t n = u.size();
  std::vector<double> m(n);
  m[0] = (u[1] - u[0]) / h - lo;
  for (std::size_t i = 1; i + 1 < n; ++i) m[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h;
  m[n - 1] = hi - (u[n - 1] - u[n - 2]) / h;
  return m;
}

double max_abs(const std::vector<double>& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::isnan(x) ? kInf : std::abs(x));
  return r;
}

// exp(beta (u - rho)) * density, zero where the density vanishes.
std::vector<double> source(const ObstacleModel& model, const std::vector<double>& u, double beta) {
  std::vector<double> e(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (model.density[i] > 0) e[i] = std::exp(beta * (u[i] - model.rho.values[i])) * model.density[i];
  return e;
}

// Solves the tridiagonal system (lower, diag, upper) x = rhs in place of rhs.
void thomas(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

std::vector<double> newton_direction(const ObstacleModel& model, const std::vector<double>& u,
                                     const std::vector<double>& residual, double beta) {
  const std::size_t n = u.size();
  const double h = model.rho.grid.spacing();
  const std::vector<double> e = source(model, u, beta);
  std::vector<double> lower(n, 1.0 / h), diag(n), upper(n, 1.0 / h);
  for (std::size_t i = 0; i < n; ++i) diag[i] = -2.0 / h - beta * e[i];
  diag[0] += 1.0 / h;
  diag[n - 1] += 1.0 / h;
  lower[0] = 0.0;
  upper[n - 1] = 0.0;
  std::vector<double> step(n);
  for (std::size_t i = 0; i < n; ++i) step[i] = -residual[i];
  thomas(std::move(lower), std::move(diag), std::move(upper), step);
  return step;
}

}  // namespace

ObstacleModel ObstacleModel::from(const PrimalPotential& rho, const DualGrid& grid) {
  if (rho.grid.dim() != 1) throw std::invalid_argument("the exponential MA solver is implemented for n=1");
  if (rho.window.empty() || !(rho.window.hi > rho.window.lo))
    throw std::invalid_argument("obstacle slope budget must have positive length");
  std::vector<double> d = nodal_ma(rho.values, rho.grid.spacing(), rho.window.lo, rho.window.hi);
  for (double& x : d) x = std::max(0.0, x);
  ObstacleModel m{rho, grid, std::move(d), convex_envelope(rho, grid)};
  if (!(m.total_density() > 0)) throw std::invalid_argument("obstacle has no positive MA density");
  return m;
}

double ObstacleModel::total_density() const { return std::accumulate(density.begin(), density.end(), 0.0); }

std::vector<double> exp_ma_residual(const ObstacleModel& model, const std::vector<double>& u, double beta) {
  std::vector<double> r = nodal_ma(u, model.rho.grid.spacing(), model.rho.window.lo, model.rho.window.hi);
  const std::vector<double> e = source(model, u, beta);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= e[i];
  return r;
}

SolveResult solve_exp_ma(const ObstacleModel& model, const SolveConfig& cfg, SolverStart start) {
  const double beta = cfg.beta;
  if (!(beta > 0)) throw std::invalid_argument("solve_exp_ma: beta must be positive");
  const NewtonConfig& nc = cfg.newton;

  std::vector<double> u = model.envelope.values;
  const double offset = start == SolverStart::envelope_minus_inverse_beta ? 1.0 / beta : 1.0;
  for (double& x : u) x -= offset;

  SolveResult out{model.rho, 0, 0.0, nc.residual_scale * model.budget(), {}};
  std::vector<double> res = exp_ma_residual(model, u, beta);
  auto sq_norm = [](const std::vector<double>& r) {
    double m = 0.0;
    for (double x : r) m += x * x;
    return m;
  };
  double r2 = sq_norm(res);
  double norm = max_abs(res);
  out.trace.push_back(std::sqrt(r2));

  auto accept = [&](std::vector<double> trial, std::vector<double> r, double trial_r2) {
    u = std::move(trial);
    res = std::move(r);
    r2 = trial_r2;
    norm = max_abs(res);
  };

  // The residual sums to budget minus total source mass, so a constant shift that balances
  // the two is available in closed form. Far from that balance the Jacobian is close to the
  // singular Neumann Laplacian and the Newton step in the constant direction overflows.
  auto balance_step = [&] {
    const std::vector<double> e = source(model, u, beta);
    const double shift = std::log(model.budget() / std::accumulate(e.begin(), e.end(), 0.0)) / beta;
    if (!std::isfinite(shift) || std::abs(beta * shift) <= 1.0) return false;
    std::vector<double> trial = u;
    for (double& x : trial) x += shift;
    std::vector<double> r = exp_ma_residual(model, trial, beta);
    const double trial_r2 = sq_norm(r);
    if (!(trial_r2 < r2)) return false;
    accept(std::move(trial), std::move(r), trial_r2);
    return true;
  };

  // Armijo backtracking on |r|_2^2, for which the Newton direction is a descent direction.
  auto newton_step = [&] {
    const std::vector<double> dir = newton_direction(model, u, res, beta);
    for (double lambda = 1.0; lambda > 1e-12; lambda *= nc.backtrack) {
      std::vector<double> trial(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + lambda * dir[i];
      std::vector<double> r = exp_ma_residual(model, trial, beta);
      const double trial_r2 = sq_norm(r);
      if (std::isfinite(trial_r2) && trial_r2 <= (1.0 - 1e-4 * lambda) * r2) {
        accept(std::move(trial), std::move(r), trial_r2);
        return true;
      }
    }
    return false;
  };
  auto step = [&] { return balance_step() || newton_step(); };

  int it = 0;
  while (norm > out.target) {
    if (it >= nc.max_iter)
      throw SolverStagnation("solve_exp_ma: no convergence within the iteration budget", out.trace);
    if (!step()) throw SolverStagnation("solve_exp_ma: line search stagnated", out.trace);
    ++it;
    out.trace.push_back(std::sqrt(r2));
  }
  for (int k = 0; k < nc.polish_steps && r2 > 0.0; ++k) {
    const auto saved_u = u;
    const auto saved_res = res;
    const double saved_r2 = r2;
    if (!step()) break;
    if (norm > out.target) {
      u = saved_u;
      res = saved_res;
      r2 = saved_r2;
      norm = max_abs(res);
      break;
    }
    out.trace.push_back(std::sqrt(r2));
  }
  out.iterations = it;
  out.residual = norm;
  out.u.values = std::move(u);
  out.u.convex = true;
  return out;
}

bool BetaSweepReport::all_ok() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const BetaRow& r) { return r.monotone_ok && r.sign_ok && r.barrier_slack >= 0.0; });
}

std::vector<double> beta_ladder(double max_beta) {
  std::vector<double> b;
  for (double x = 1.0; x <= max_beta * (1 + 1e-12); x *= 2.0) b.push_back(x);
  return b;
}

BetaSweepReport beta_sweep(const ObstacleModel& model, std::span<const double> betas, const NewtonConfig& newton) {
  std::vector<double> ladder(betas.begin(), betas.end());
  std::sort(ladder.begin(), ladder.end());
  if (ladder.empty()) throw std::invalid_argument("beta_sweep: empty beta list");
  const bool has_one = ladder.front() == 1.0;
  if (!has_one) ladder.insert(ladder.begin(), 1.0);

  std::vector<std::optional<SolveResult>> solved(ladder.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < long(ladder.size()); ++k)
    solved[std::size_t(k)] = solve_exp_ma(model, {ladder[std::size_t(k)], newton});

  BetaSweepReport rep;
  rep.tol = Tolerances::from(model.rho.grid, model.grid).lt;
  const auto& e = model.envelope.values;
  const auto& u1 = solved.front()->u.values;
  for (std::size_t k = has_one ? 0 : 1; k < ladder.size(); ++k) {
    const double beta = ladder[k];
    const auto& u = solved[k]->u.values;
    BetaRow row;
    row.beta = beta;
    row.iterations = solved[k]->iterations;
    row.residual = solved[k]->residual;
    row.barrier_slack = kInf;
    for (std::size_t i = 0; i < u.size(); ++i) {
      row.dist_to_envelope = std::max(row.dist_to_envelope, std::abs(u[i] - e[i]));
      if (u[i] > model.rho.values[i] + rep.tol) row.sign_ok = false;
      if (k > 0 && u[i] < solved[k - 1]->u.values[i] - rep.tol) row.monotone_ok = false;
      const double rhs = (1.0 - 1.0 / beta) * e[i] + u1[i] / beta - std::log(beta) / beta - rep.tol;
      row.barrier_slack = std::min(row.barrier_slack, u[i] - rhs);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

ContactReport contact_check(const ObstacleModel& model, const Tolerances& tol) {
  const auto& e = model.envelope.values;
  std::vector<double> m = nodal_ma(e, model.rho.grid.spacing(), model.envelope.window.lo, model.envelope.window.hi);
  ContactReport rep;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double mass = std::max(0.0, m[i]);
    if (e[i] < model.rho.values[i] - tol.lt) {
      rep.off_contact_mass += mass;
    } else {
      ++rep.contact_nodes;
      rep.max_density_excess = std::max(rep.max_density_excess, mass - model.density[i]);
    }
  }
  const SlopeBody& body = model.grid.body();
  rep.lelong_zero = model.envelope.window.lo - body.lo();
  rep.lelong_infinity = body.hi() - model.envelope.window.hi;
  rep.ok = rep.off_contact_mass <= tol.mass && rep.max_density_excess <= tol.mass;
  return rep;
}

double variational_F(const std::vector<double>& u, const ObstacleModel& model, double beta) {
  const double h = model.rho.grid.spacing();
  const double lo = model.rho.window.lo;
  const double hi = model.rho.window.hi;
  auto phi = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) s += (v[i + 1] - v[i]) * (v[i + 1] - v[i]);
    return -s / (2.0 * h) - lo * v.front() + hi * v.back();
  };
  const std::vector<double> src = source(model, u, beta);
  const double vol = model.budget();
  const double exp_term = std::accumulate(src.begin(), src.end(), 0.0);
  return (phi(u) - phi(model.envelope.values)) / vol - exp_term / (beta * vol);
}

}  // namespace pluri
