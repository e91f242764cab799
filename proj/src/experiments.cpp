#include "pluri/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>

#include "pluri/capacity.hpp"
#include "pluri/envelopes.hpp"
#include "pluri/geodesics.hpp"
#include "pluri/io.hpp"
#include "pluri/ma_solver.hpp"

namespace pluri::lab {

CheckRow CheckRow::value(std::string name, double expected, double observed, double tolerance, std::string detail) {
  CheckRow r;
  r.name = std::move(name);
  r.kind = Kind::value;
  r.expected = expected;
  r.observed = observed;
  r.tolerance = tolerance;
  r.pass = std::abs(expected - observed) <= tolerance || expected == observed;
  r.detail = std::move(detail);
  return r;
}

CheckRow CheckRow::predicate(std::string name, bool expected, bool observed, std::string detail) {
  CheckRow r;
  r.name = std::move(name);
  r.kind = Kind::predicate;
  r.expected = expected ? 1.0 : 0.0;
  r.observed = observed ? 1.0 : 0.0;
  r.pass = expected == observed;
  r.detail = std::move(detail);
  return r;
}

bool ExperimentReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

std::size_t ExperimentReport::pass_count() const {
  return std::size_t(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; }));
}

namespace {

std::string registered_ids();

}  // namespace

UnknownExperimentError::UnknownExperimentError(const std::string& id)
    : std::invalid_argument("unregistered experiment id '" + id + "'; registered: " + registered_ids()) {}

namespace {

using io::format_double;

struct Ctx {
  const Scene& scene;
  ParamReader params;
  const RunOptions& options;
  ExperimentReport& report;

  void add(CheckRow row) { report.rows.push_back(std::move(row)); }

  template <class Writer>
  void artifact(const std::string& name, Writer&& write) {
    if (!options.artifact_dir) return;
    write(*options.artifact_dir / name);
    report.artifacts.push_back(name);
  }
};

/// Independent stream per row, so results do not depend on scheduling.
std::mt19937_64 row_rng(std::uint64_t seed, std::uint64_t row) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(row), std::uint32_t(row >> 32)};
  return std::mt19937_64(seq);
}

void need_dimension(const Ctx& c, int dim) {
  if (c.scene.dimension != dim)
    throw SceneError("/dimension", c.scene.experiment_id + " needs a dimension-" + std::to_string(dim) + " scene");
}

std::string body_param(Ctx& c, const std::string& key = "body") {
  std::string fallback;
  if (c.scene.bodies.size() == 1) fallback = c.scene.bodies.begin()->first;
  const std::string name = c.params.text(key, fallback);
  if (name.empty()) throw SceneError("/experiment/params/" + key, "required when the scene has several slope bodies");
  c.scene.body(name);
  return name;
}

std::vector<std::string> potentials_on(Ctx& c, const std::string& body) {
  std::vector<std::string> fallback;
  for (const auto& [name, pot] : c.scene.potentials)
    if (pot.body == body) fallback.push_back(name);
  auto names = c.params.names("potentials", fallback);
  for (const auto& n : names) {
    auto it = c.scene.potentials.find(n);
    if (it == c.scene.potentials.end()) throw SceneError("/experiment/params/potentials", "unknown potential '" + n + "'");
    if (it->second.body != body) throw SceneError("/experiment/params/potentials", "potential '" + n + "' is not on body '" + body + "'");
  }
  if (names.empty()) throw SceneError("/potentials", "no potentials on body '" + body + "'");
  return names;
}

std::string potential_param(Ctx& c, const std::string& key, const std::string& fallback) {
  const std::string name = c.params.text(key, fallback);
  if (!c.scene.potentials.contains(name))
    throw SceneError("/experiment/params/" + key, "unknown potential '" + name + "'");
  return name;
}

/// psi shifted down so that psi <= phi on the box.
Potential below(const Potential& phi, const Potential& psi) {
  double top = 0.0;
  for (std::size_t i = 0; i < psi.primal().values.size(); ++i)
    top = std::max(top, psi.primal().values[i] - phi.primal().values[i]);
  return top > 0 ? psi.shifted(-top) : psi;
}

double max_frame_distance(const PotentialCurve& curve, const Potential& target) {
  double d = 0.0;
  for (const Potential& f : curve.frames) d = std::max(d, sup_distance(f.primal(), target.primal()));
  return d;
}

std::string kv(const std::string& key, double v) { return key + "=" + format_double(v); }
std::string kv(const std::string& key, bool v) { return key + "=" + (v ? "true" : "false"); }

/// V plus a few Gaussian bumps, projected to an admissible potential of the same type as V.
Potential bumped(const BigClass& cls, std::mt19937_64& rng, int bumps) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0), centre(-4.0, 4.0), width(0.5, 2.0);
  const Potential& v = cls.envelope();
  PrimalPotential f{v.primal_grid(), v.primal().values, SlopeWindow::of(cls.body()), false};
  for (int j = 0; j < bumps; ++j) {
    const double a = amp(rng), x0 = centre(rng), s = width(rng);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const double x = f.grid.point(i).x - x0;
      f.values[i] += a * std::exp(-x * x / (s * s));
    }
  }
  return project(f, cls.disc().dual);
}

/// Least k >= 0 for which the integral of r^(2k + 1 - 2 t nu) over (0, 1) converges, found by
/// quadrature of the tail in the variable s = -log r: the integrand is exp(-(2k + 2 - 2 t nu) s).
int integrability_oracle(double t, double nu) {
  auto tail = [&](int k) {
    const double rate = 2.0 * k + 2.0 - 2.0 * t * nu;
    const double a = 200.0, b = 400.0;
    const int steps = 4000;
    const double h = (b - a) / steps;
    double s = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * std::exp(-rate * (a + i * h));
    }
    return s * h / 3.0;
  };
  for (int k = 0; k < 1000; ++k)
    if (tail(k) < 1e-6) return k;
  return -1;
}

// ---------------------------------------------------------------------------------------

void run_lelong(Ctx& c) {
  need_dimension(c, 1);
  const std::string body = body_param(c);
  const auto names = potentials_on(c, body);
  const double gamma = c.params.number("obstacle_gamma", 0.3);
  const int obstacle_m = c.params.integer("obstacle_M", 501);
  const int family = c.params.integer("family", 8);
  c.params.finish();

  const auto disc = c.scene.discretization(c.scene.body(body));
  const BigClass cls = BigClass::toric(disc);
  const Tolerances tol = cls.tol();
  for (const auto& name : names) {
    const Potential u = c.scene.potential(name);
    const double nu0 = lelong(u, End::zero);
    const double nu1 = lelong(u, End::infinity);
    if (full_mass_test(cls, u)) {
      c.add(CheckRow::value("lelong at 0-end: " + name, 0.0, nu0, 0.0, "full mass"));
      c.add(CheckRow::value("lelong at inf-end: " + name, 0.0, nu1, 0.0, "full mass"));
    } else {
      c.add(CheckRow::value("lelong total equals missing mass: " + name, cls.volume() - np_mass(u), nu0 + nu1, tol.mass,
                            kv("nu0", nu0) + " " + kv("nuinf", nu1)));
    }
  }

  const SlopeBody& b = c.scene.body(body);
  const auto odisc = Discretization::make(b, disc.primal.half_width(), disc.primal.points(), obstacle_m);
  PresetParams p;
  p.slopes = std::pair{b.lo() + gamma, b.hi()};
  const BigClass ocls = BigClass::obstacle(std::get<PrimalPotential>(preset("wiggle_obstacle", p, odisc)), odisc);
  const Potential& v = ocls.envelope();
  const double nu_v = lelong(v, End::zero);
  const double nu_v_inf = lelong(v, End::infinity);
  c.add(CheckRow::value("obstacle class lelong at 0-end", gamma, nu_v, 0.5 * odisc.dual.spacing(),
                        "read from the finite dual domain of the envelope"));

  const SlopeWindow dom = finite_window(v.dual());
  for (int k = 0; k < family; ++k) {
    auto rng = row_rng(c.scene.seed, std::uint64_t(k));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double a = 2.0 * unit(rng), lift = unit(rng), alpha = unit(rng);
    const double mid = dom.lo + (dom.hi - dom.lo) * unit(rng);
    DualPotential w = v.dual();
    for (std::size_t j = 0; j < w.values.size(); ++j) {
      if (!w.finite(j)) continue;
      const double q = w.grid.point(j).x;
      const double l = std::max(0.0, q - dom.lo), r = std::max(0.0, dom.hi - q);
      w.values[j] += a * (q - mid) * (q - mid) + lift + alpha * ((l > 0 ? l * std::log(l) : 0.0) + (r > 0 ? r * std::log(r) : 0.0) + 1.0);
    }
    const Potential phi = Potential::from_dual(std::move(w), odisc.primal, "family");
    const std::string id = "family member " + std::to_string(k);
    c.add(CheckRow::value(id + ": mass equals class mass", np_mass(v), np_mass(phi), 0.0));
    c.add(CheckRow::value(id + ": lelong at 0-end equals the envelope's", nu_v, lelong(phi, End::zero), 0.0));
    c.add(CheckRow::value(id + ": lelong at inf-end equals the envelope's", nu_v_inf, lelong(phi, End::infinity), 0.0));
  }
}

void run_mult(Ctx& c) {
  need_dimension(c, 1);
  const std::string body = body_param(c);
  const auto names = potentials_on(c, body);
  const int t_max = c.params.integer("t_max", 8);
  c.params.finish();

  const BigClass cls = BigClass::toric(c.scene.discretization(c.scene.body(body)));
  const double nu_v0 = lelong(cls.envelope(), End::zero);
  const double nu_v1 = lelong(cls.envelope(), End::infinity);
  for (const auto& name : names) {
    const Potential u = c.scene.potential(name);
    const double nu[2] = {lelong(u, End::zero), lelong(u, End::infinity)};
    const double nu_v[2] = {nu_v0, nu_v1};
    const char* ends[2] = {"0-end", "inf-end"};
    const bool full = full_mass_test(cls, u);
    for (int e = 0; e < 2; ++e) {
      int mismatches = 0;
      int against_v = 0;
      for (int t = 1; t <= t_max; ++t) {
        const int k = mult_ideal_exponent(t, nu[e]);
        if (k != integrability_oracle(t, nu[e])) ++mismatches;
        if (k != mult_ideal_exponent(t, nu_v[e])) ++against_v;
      }
      c.add(CheckRow::value("exponent matches integrability oracle: " + name + " " + ends[e], 0.0, mismatches, 0.0,
                            kv("nu", nu[e])));
      if (full)
        c.add(CheckRow::value("exponent equals the envelope's: " + name + " " + ends[e], 0.0, against_v, 0.0,
                              "full mass, t = 1.." + std::to_string(t_max)));
    }
  }
}

void run_rwn(Ctx& c) {
  need_dimension(c, 1);
  const std::string body = body_param(c);
  const auto names = potentials_on(c, body);
  const double horizon = c.params.number("horizon", 8.0);
  const int intervals = c.params.integer("intervals", 16);
  c.params.finish();

  const BigClass cls = BigClass::toric(c.scene.discretization(c.scene.body(body)));
  const Tolerances tol = cls.tol();
  const Potential& v = cls.envelope();
  for (const auto& name : names) {
    const Potential psi = below(v, c.scene.potential(name));
    const bool full = full_mass_test(cls, psi);
    const CInvariant ci = c_invariant(cls, psi);
    const bool c_zero = std::abs(ci.value) <= tol.energy;
    const PotentialCurve ray = geodesic_ray(v, psi, horizon, intervals);
    const double ray_dev = max_frame_distance(ray, v);
    const bool constant = ray_dev <= tol.lt;
    const RwnSweepResult rwn = rwn_envelope(v, psi);
    const double rwn_dev = sup_distance(rwn.limit.primal(), v.primal());
    const bool fixed = rwn_dev <= tol.lt;
    const bool agree = full == c_zero && c_zero == constant && constant == fixed;
    c.add(CheckRow::predicate("four characterizations agree: " + name, true, agree,
                              kv("full", full) + " " + kv("c", ci.value) + " " + kv("ray_dev", ray_dev) + " " +
                                  kv("rwn_dev", rwn_dev)));
    c.add(CheckRow::predicate("envelope sweep monotone: " + name, true, rwn.monotone));
    c.artifact("T12-rwn_" + name + "_sweep.csv", [&](const auto& path) { io::write_sweep_csv(path, rwn, tol.lt); });
  }
}

void run_additivity(Ctx& c) {
  std::vector<std::string> names;
  if (c.scene.dimension == 1) {
    const std::string body = body_param(c);
    names = potentials_on(c, body);
  } else {
    names = c.params.names("potentials", c.scene.potential_names());
  }
  c.params.finish();

  std::vector<Potential> pots;
  for (const auto& n : names) pots.push_back(c.scene.potential(n));
  auto class_of = [](const Potential& u) { return BigClass::toric(u.discretization()); };

  for (std::size_t i = 0; i < pots.size(); ++i) {
    for (std::size_t j = i + (c.scene.dimension == 1 ? 0 : 1); j < pots.size(); ++j) {
      const Potential& u = pots[i];
      const Potential& w = pots[j];
      const Potential sum = potential_sum(u, w);
      const BigClass sum_cls = class_of(sum);
      const bool fu = full_mass_test(class_of(u), u);
      const bool fw = full_mass_test(class_of(w), w);
      const bool fs = full_mass_test(sum_cls, sum);
      const std::string pair = names[i] + " + " + names[j];
      c.add(CheckRow::predicate("sum is full iff both summands are: " + pair, fu && fw, fs,
                                kv("full_u", fu) + " " + kv("full_v", fw) + " " + kv("mass_sum", np_mass(sum))));
      if (c.scene.dimension == 2) {
        const SlopeWindow predicted = minkowski_sum(finite_window(u.dual()), finite_window(w.dual()));
        const double area = predicted.measure();
        const Tolerances tol = sum_cls.tol();
        c.add(CheckRow::value("sum mass equals Minkowski area of the domains: " + pair, area, np_mass(sum), tol.mass));
        const bool predicted_full = std::abs(area - sum_cls.volume()) <= tol.mass;
        c.add(CheckRow::predicate("sum fullness matches the domain prediction: " + pair, predicted_full, fs,
                                  kv("predicted_area", area) + " " + kv("class_volume", sum_cls.volume())));
      }
    }
  }
}

void run_beta(Ctx& c) {
  need_dimension(c, 1);
  std::string fallback;
  for (const auto& [name, pot] : c.scene.potentials)
    if (pot.source == PotentialSource::preset && pot.preset == "wiggle_obstacle") fallback = name;
  const std::string name = potential_param(c, "obstacle", fallback);
  const double beta_max = c.params.number("beta_max", 256.0);
  const double envelope_tol = c.params.number("envelope_tolerance", 0.05);
  const double beta_unique = c.params.number("uniqueness_beta", 4.0);
  const int candidates = c.params.integer("perturbations", 50);
  const double noise = c.params.number("perturbation_amplitude", 0.05);
  c.params.finish();

  const PresetValue raw = c.scene.raw(name);
  const PrimalPotential rho = std::holds_alternative<PrimalPotential>(raw) ? std::get<PrimalPotential>(raw)
                                                                          : std::get<Potential>(raw).primal();
  const auto disc = c.scene.discretization(c.scene.body(c.scene.potentials.at(name).body));
  const Tolerances tol = disc.tolerances();
  const ObstacleModel model = ObstacleModel::from(rho, disc.dual);

  const auto ladder = beta_ladder(beta_max);
  const BetaSweepReport sweep = beta_sweep(model, ladder);
  for (const BetaRow& r : sweep.rows) {
    const std::string b = "beta " + format_double(r.beta);
    c.add(CheckRow::predicate(b + ": monotone in beta", true, r.monotone_ok));
    c.add(CheckRow::predicate(b + ": below the obstacle", true, r.sign_ok));
    c.add(CheckRow::predicate(b + ": barrier slack nonnegative", true, r.barrier_slack >= 0.0, kv("slack", r.barrier_slack)));
  }
  c.add(CheckRow::value("distance to envelope at largest beta", 0.0, sweep.rows.back().dist_to_envelope, envelope_tol));
  c.artifact("T23-beta_sweep.csv", [&](const auto& path) { io::write_beta_csv(path, sweep); });

  const ContactReport contact = contact_check(model, tol);
  c.add(CheckRow::value("envelope mass off the contact set", 0.0, contact.off_contact_mass, tol.mass,
                        kv("contact_nodes", double(contact.contact_nodes))));

  const SolveConfig cfg{beta_unique, {}};
  const SolveResult a = solve_exp_ma(model, cfg, SolverStart::envelope_minus_inverse_beta);
  const SolveResult b = solve_exp_ma(model, cfg, SolverStart::envelope_minus_one);
  double gap = 0.0;
  for (std::size_t i = 0; i < a.u.values.size(); ++i) gap = std::max(gap, std::abs(a.u.values[i] - b.u.values[i]));
  c.add(CheckRow::value("two starts give the same solution", 0.0, gap, 10.0 * a.target,
                        kv("beta", beta_unique) + " " + kv("residual_a", a.residual) + " " + kv("residual_b", b.residual)));

  const double best = variational_F(a.u.values, model, beta_unique);
  double worst_margin = kInf;
  for (int k = 0; k < candidates; ++k) {
    auto rng = row_rng(c.scene.seed, 1000 + std::uint64_t(k));
    std::uniform_real_distribution<double> amp(-noise, noise), centre(-4.0, 4.0), width(0.25, 2.0);
    PrimalPotential f = a.u;
    f.convex = false;
    for (int j = 0; j < 3; ++j) {
      const double h = amp(rng), x0 = centre(rng), s = width(rng);
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double x = f.grid.point(i).x - x0;
        f.values[i] += h * std::exp(-x * x / (s * s));
      }
    }
    const PrimalPotential g = convex_envelope(f, disc.dual);
    worst_margin = std::min(worst_margin, best - variational_F(g.values, model, beta_unique));
  }
  c.add(CheckRow::predicate("solution maximizes the functional against perturbations", true,
                            worst_margin >= -tol.energy, kv("worst_margin", worst_margin) + " " + kv("tol", tol.energy)));
}

Weight weight_for(double p) { return p == 1.0 ? Weight::identity() : Weight::power(p); }

void run_rooftop(Ctx& c) {
  need_dimension(c, 1);
  const std::string body = body_param(c);
  const auto names = potentials_on(c, body);
  const auto exponents = c.params.numbers("weights", {1.0, 0.5, 0.25});
  const int random_pairs = c.params.integer("random_pairs", 100);
  const int random_obstacles = c.params.integer("random_obstacles", 20);
  c.params.finish();

  const auto disc = c.scene.discretization(c.scene.body(body));
  const BigClass cls = BigClass::toric(disc);
  const Tolerances tol = cls.tol();
  std::vector<Potential> pots;
  for (const auto& n : names) pots.push_back(c.scene.potential(n));

  for (std::size_t i = 0; i < pots.size(); ++i) {
    for (std::size_t j = i + 1; j < pots.size(); ++j) {
      const std::string pair = names[i] + ", " + names[j];
      const Potential fast = rooftop_dual(pots[i], pots[j]);
      const Potential slow = rooftop(pots[i], pots[j]);
      c.add(CheckRow::value("rooftop dual identity: " + pair, 0.0, sup_distance(fast.primal(), slow.primal()), tol.lt));
      if (full_mass_test(cls, pots[i])) {
        const DominationReport d = check_domination(cls, slow, pots[i]);
        c.add(CheckRow::predicate("rooftop dominated by first argument: " + pair, true, d.holds, d.message));
      }
    }
  }

  for (double p : exponents) {
    const Weight w = weight_for(p);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < pots.size(); ++i)
      if (full_mass_test(cls, pots[i]) && std::isfinite(chi_energy(cls, pots[i], w))) members.push_back(i);
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const Potential& u = pots[members[a]];
        const Potential& v = pots[members[b]];
        const std::string pair = w.name + ": " + names[members[a]] + ", " + names[members[b]];
        const double roof = chi_energy(cls, rooftop(u, v), w);
        c.add(CheckRow::predicate("rooftop has finite weighted energy " + pair, true, std::isfinite(roof), kv("energy", roof)));
        double worst = 0.0;
        for (double t : {0.25, 0.5, 0.75}) worst = std::max(worst, chi_energy(cls, convex_combination(u, v, t), w));
        c.add(CheckRow::predicate("convex combinations have finite weighted energy " + pair, true, std::isfinite(worst),
                                  kv("largest", worst)));
      }
    }
  }

  double biconj = 0.0;
  double dual_identity = 0.0;
  int disjoint = 0;
  for (int k = 0; k < random_pairs; ++k) {
    auto rng = row_rng(c.scene.seed, std::uint64_t(k));
    std::uniform_int_distribution<int> pieces(2, 8);
    const Potential u = random_piecewise_affine(disc, rng, pieces(rng));
    const Potential v = random_piecewise_affine(disc, rng, pieces(rng));
    const PrimalPotential back = legendre_to_primal(legendre_to_dual(u.primal(), disc.dual), disc.primal);
    biconj = std::max(biconj, sup_distance(back, u.primal()));
    const DualPotential m = dual_max(u.dual(), v.dual());
    if (intersect(u.window(), v.window()).empty()) {
      ++disjoint;
      if (m.finite_count() != 0) dual_identity = kInf;
      continue;
    }
    const Potential r = rooftop(u, v);
    const Potential fast = Potential::from_dual(m, disc.primal);
    dual_identity = std::max(dual_identity, sup_distance(r.primal(), fast.primal()));
  }
  if (random_pairs > 0) {
    c.add(CheckRow::value("biconjugation on random piecewise-affine potentials", 0.0, biconj, tol.lt,
                          std::to_string(random_pairs) + " trials"));
    c.add(CheckRow::value("rooftop dual identity on random pairs", 0.0, dual_identity, tol.lt,
                          std::to_string(random_pairs) + " trials, " + std::to_string(disjoint) +
                              " with disjoint windows"));
  }

  double off_contact = 0.0;
  for (int k = 0; k < random_obstacles; ++k) {
    auto rng = row_rng(c.scene.seed, 5000 + std::uint64_t(k));
    std::uniform_real_distribution<double> amp(-1.0, 1.0), centre(-4.0, 4.0), width(0.3, 2.0);
    PrimalPotential f{disc.primal, cls.envelope().primal().values, SlopeWindow::of(cls.body()), false};
    for (int j = 0; j < 4; ++j) {
      const double a = amp(rng), x0 = centre(rng), s = width(rng);
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double x = f.grid.point(i).x - x0;
        f.values[i] += a * std::exp(-x * x / (s * s));
      }
    }
    off_contact = std::max(off_contact, contact_check(ObstacleModel::from(f, disc.dual), tol).off_contact_mass);
  }
  if (random_obstacles > 0)
    c.add(CheckRow::value("projection puts no mass off the contact set", 0.0, off_contact, tol.mass,
                          std::to_string(random_obstacles) + " random obstacles"));
}

void run_convexity(Ctx& c) {
  need_dimension(c, 1);
  const std::string body = body_param(c);
  const int count = c.params.integer("curves", 20);
  const int intervals = c.params.integer("intervals", 64);
  const double eps = c.params.number("eps", 0.1);
  const int bumps = c.params.integer("bumps", 3);
  const std::string endpoint = c.params.text("derivative_endpoint", c.scene.potentials.contains("entropy") ? "entropy" : "");
  const int d_intervals = c.params.integer("derivative_intervals", 256);
  const double d_eps = c.params.number("derivative_eps", 0.1);
  c.params.finish();

  const BigClass cls = BigClass::toric(c.scene.discretization(c.scene.body(body)));
  const Tolerances tol = cls.tol();
  std::vector<std::optional<CheckRow>> rows(std::size_t(std::max(count, 0)));
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    auto rng = row_rng(c.scene.seed, std::uint64_t(k));
    const Potential u0 = bumped(cls, rng, bumps);
    const Potential u1 = bumped(cls, rng, bumps);
    const PotentialCurve curve = mollify_time(barrier_subgeodesic(u0, u1, intervals), eps);
    const EnergyAlongReport e = energy_along(cls, curve);
    rows[std::size_t(k)] = CheckRow::predicate("energy convex along mollified subgeodesic " + std::to_string(k), true,
                                               e.min_second_difference >= -10.0 * tol.energy,
                                               kv("min_second_difference", e.min_second_difference));
  }
  for (auto& r : rows) c.add(std::move(*r));

  if (endpoint.empty()) return;
  const Potential target = c.scene.potential(endpoint);
  const PotentialCurve moll = mollify_time(barrier_subgeodesic(cls.envelope(), target, d_intervals), d_eps);
  const DerivativeReport d = derivative_check(cls, moll, d_intervals);
  c.add(CheckRow::value("first derivative formula, relative error", 0.0, d.first_rel_error, 1e-2, "endpoint " + endpoint));
  c.add(CheckRow::value("second derivative formula, relative error", 0.0, d.second_rel_error, 5e-2, "endpoint " + endpoint));
}

void run_linear(Ctx& c) {
  need_dimension(c, 1);
  const std::string body = body_param(c);
  const std::string endpoint = potential_param(c, "endpoint", "entropy");
  const int intervals = c.params.integer("intervals", 64);
  const bool has_energy = c.params.has("endpoint_energy");
  const double given_energy = c.params.number("endpoint_energy", 0.0);
  const int hmae_intervals = c.params.integer("hmae_intervals", 16);
  c.params.finish();

  const BigClass cls = BigClass::toric(c.scene.discretization(c.scene.body(body)));
  const Tolerances tol = cls.tol();
  const Potential& v = cls.envelope();
  const Potential psi = c.scene.potential(endpoint);
  const PotentialCurve seg = geodesic_segment(v, psi, intervals);
  const EnergyAlongReport e = energy_along(cls, seg);
  c.add(CheckRow::value("deviation from the chord", 0.0, e.chord_deviation, tol.energy, std::to_string(seg.size()) + " nodes"));

  const double end_energy = has_energy ? given_energy : energy(cls, psi).value;
  double closed = 0.0;
  for (std::size_t k = 0; k < seg.size(); ++k) closed = std::max(closed, std::abs(e.values[k] - seg.times[k] * end_energy));
  c.add(CheckRow::value("energy equals t times endpoint energy", 0.0, closed, tol.energy, kv("endpoint_energy", end_energy)));

  if (hmae_intervals > 0) {
    const double d = curve_distance(hmae_envelope_segment(v, psi, hmae_intervals), geodesic_segment(v, psi, hmae_intervals));
    c.add(CheckRow::value("primal envelope construction matches the dual segment", 0.0, d, tol.geo));
  }

  const PotentialCurve bar = barrier_subgeodesic(v, psi, intervals);
  double above = 0.0, beyond = 0.0;
  for (std::size_t k = 0; k < seg.size(); ++k) {
    const double t = seg.times[k];
    const auto& g = seg.frames[k].primal().values;
    const auto& b = bar.frames[k].primal().values;
    for (std::size_t i = 0; i < g.size(); ++i) {
      above = std::max(above, b[i] - g[i]);
      beyond = std::max(beyond, g[i] - ((1 - t) * v.primal().values[i] + t * psi.primal().values[i]));
    }
  }
  c.add(CheckRow::predicate("barrier lies below the geodesic", true, above <= tol.lt, kv("excess", above)));
  c.add(CheckRow::predicate("geodesic lies below the linear interpolation", true, beyond <= tol.lt, kv("excess", beyond)));
  c.artifact("T39-linear_curve.csv", [&](const auto& path) { io::write_curve_csv(path, cls, seg); });
}

void run_ray(Ctx& c) {
  need_dimension(c, 1);
  const std::string body = body_param(c);
  const std::string target = potential_param(c, "target", "half_body");
  const double horizon = c.params.number("horizon", 8.0);
  const int intervals = c.params.integer("intervals", 32);
  const bool has_expected = c.params.has("expected_c");
  const double expected = c.params.number("expected_c", 0.0);
  c.params.finish();

  const BigClass cls = BigClass::toric(c.scene.discretization(c.scene.body(body)));
  const Tolerances tol = cls.tol();
  const Potential& v = cls.envelope();
  const Potential psi = below(v, c.scene.potential(target));
  const CInvariant ci = c_invariant(cls, psi);
  c.add(CheckRow::value("asymptotic slope: closed form vs secant", ci.closed_form, ci.secant, tol.energy));
  if (has_expected) c.add(CheckRow::value("asymptotic slope: closed form vs expected", expected, ci.closed_form, tol.energy));

  const PotentialCurve ray = geodesic_ray(v, psi, horizon, intervals);
  c.add(CheckRow::predicate("ray frames stabilized along the l-schedule", true, ray.stabilized));
  const EnergyAlongReport e = energy_along(cls, ray);
  double dev = 0.0;
  for (std::size_t k = 0; k < ray.size(); ++k) dev = std::max(dev, std::abs(e.values[k] - ray.times[k] * ci.closed_form));
  c.add(CheckRow::value("energy along the ray is t times the slope", 0.0, dev, tol.energy,
                        "t in [0, " + format_double(horizon) + "]"));
  double rise = 0.0;
  for (std::size_t k = 1; k < ray.size(); ++k) {
    const auto& now = ray.frames[k].primal().values;
    const auto& before = ray.frames[k - 1].primal().values;
    for (std::size_t i = 0; i < now.size(); ++i) rise = std::max(rise, now[i] - before[i]);
  }
  c.add(CheckRow::predicate("ray frames non-increasing in t", true, rise <= tol.lt, kv("largest_rise", rise)));
  c.artifact("L38-ray_curve.csv", [&](const auto& path) { io::write_curve_csv(path, cls, ray); });
}

void run_legendre(Ctx& c) {
  need_dimension(c, 1);
  const std::string body = body_param(c);
  const std::string target = potential_param(c, "target", "half_body");
  const double horizon = c.params.number("horizon", 8.0);
  const int intervals = c.params.integer("intervals", 32);
  const auto taus = c.params.numbers("taus", {-0.25, -0.125, 0.25});
  c.params.finish();

  const BigClass cls = BigClass::toric(c.scene.discretization(c.scene.body(body)));
  const Tolerances tol = cls.tol();
  const Potential& v = cls.envelope();
  const PotentialCurve ray = geodesic_ray(v, below(v, c.scene.potential(target)), horizon, intervals);
  for (double tau : taus) {
    const LegendreSlice s = ray_time_legendre(ray, tau);
    const std::string id = "tau " + format_double(tau);
    if (tau > 0) {
      c.add(CheckRow::predicate(id + ": infimum is -inf", true, s.minus_infinity));
      continue;
    }
    if (!s.potential) {
      c.add(CheckRow::predicate(id + ": slice exists", true, false));
      continue;
    }
    const RwnSweepResult r = rwn_envelope(ray.frames.front(), *s.potential);
    c.add(CheckRow::value(id + ": slice is a fixed point of the envelope", 0.0,
                          sup_distance(r.limit.primal(), s.potential->primal()), tol.lt,
                          kv("unbounded_nodes", double(s.unbounded_nodes))));
  }
}

void run_logconcave(Ctx& c) {
  need_dimension(c, 2);
  const std::string first = body_param(c, "first");
  const std::string second = body_param(c, "second");
  const int pairs = c.params.integer("pairs", 10);
  const double rel = c.params.number("mixed_volume_tolerance", 0.01);
  c.params.finish();

  const auto d1 = c.scene.discretization(c.scene.body(first));
  const auto d2 = c.scene.discretization(c.scene.body(second));
  const BigClass c1 = BigClass::toric(d1);
  const BigClass c2 = BigClass::toric(d2);
  const double mv = mixed_volume(c1.body(), c2.body());
  c.add(CheckRow::value("mixed mass of envelopes equals mixed volume", mv, mixed_ma_mass(c1.envelope(), c2.envelope()).value,
                        rel * mv));

  const Tolerances tol = c1.tol();
  for (int k = 0; k < pairs; ++k) {
    auto rng = row_rng(c.scene.seed, std::uint64_t(k));
    const Discretization& du = k % 3 == 2 ? d2 : d1;
    const Discretization& dv = k % 3 == 1 ? d1 : d2;
    const Potential u = random_full_mass(du, rng);
    const Potential v = random_full_mass(dv, rng);
    const MixedMass m = mixed_ma_mass(u, v);
    const double bound = std::sqrt(np_mass(u) * np_mass(v));
    const std::string id = "pair " + std::to_string(k) + " (" + (k % 3 == 2 ? second : first) + ", " + (k % 3 == 1 ? first : second) + ")";
    c.add(CheckRow::predicate(id + ": both full mass", true, m.hypotheses_met));
    c.add(CheckRow::predicate(id + ": mixed mass above geometric mean", true, m.value >= bound - tol.energy,
                              kv("mixed", m.value) + " " + kv("geometric_mean", bound)));
  }
}

void run_capacity(Ctx& c) {
  need_dimension(c, 2);
  const std::string first = body_param(c, "first");
  const std::string second = body_param(c, "second");
  const auto discs = c.params.numbers("discs", {2, 2, 1, -2, -2, 0.25, 2, -2, 1, -2, 2, 0.25, 3, 0, 1,
                                                0, 3, 0.25, 1, 1, 1, -1, -1, 0.25, 2.5, 2.5, 1, 1.5, -0.5, 0.25});
  const int oracle_samples = c.params.integer("oracle_samples", 500);
  const int oracle_points = c.params.integer("oracle_grid", 33);
  const auto oracle_disc = c.params.numbers("oracle_disc", {0.5, 0.5, 1.0});
  c.params.finish();
  if (discs.empty() || discs.size() % 3 != 0) throw SceneError("/experiment/params/discs", "expected [cx, cy, r] triples");
  if (oracle_disc.size() != 3) throw SceneError("/experiment/params/oracle_disc", "expected [cx, cy, r]");

  const auto d1 = c.scene.discretization(c.scene.body(first));
  const auto d2 = c.scene.discretization(c.scene.body(second));
  if (!(d1.primal == d2.primal)) throw SceneError("/grid", "both bodies must share the primal grid");
  const BigClass c1 = BigClass::toric(d1);
  const BigClass c2 = BigClass::toric(d2);
  std::vector<NamedSet> family;
  for (std::size_t k = 0; k < discs.size(); k += 3) {
    const std::string id = "disc(" + format_double(discs[k]) + "," + format_double(discs[k + 1]) + ";" + format_double(discs[k + 2]) + ")";
    family.push_back({id, ball_set(d1.primal, {discs[k], discs[k + 1]}, discs[k + 2])});
    if (std::none_of(family.back().nodes.begin(), family.back().nodes.end(), [](std::uint8_t b) { return b != 0; }))
      throw SceneError("/experiment/params/discs", id + " contains no grid node");
  }
  const ComparisonTable table = comparison_experiment(c1, c2, family);
  for (const ComparisonRow& r : table.rows)
    c.add(CheckRow::predicate("explicit capacity bound: " + r.id, true, r.prop25_ok,
                              kv("T", r.t1) + " " + kv("bound", r.prop25_bound) + " " + kv("cap", r.cap1)));
  c.add(CheckRow::predicate("comparison constant bounded across the family", true, table.c_bounded,
                            kv("C_min", table.c_min) + " " + kv("C_max", table.c_max)));
  c.artifact("CAP-compare_table.csv", [&](const auto& path) { io::write_comparison_csv(path, table); });

  if (oracle_samples > 0) {
    const auto ds = Discretization::make(c1.body(), d1.primal.half_width(), oracle_points, oracle_points);
    const BigClass small = BigClass::toric(ds);
    const NodeSet e = ball_set(ds.primal, {oracle_disc[0], oracle_disc[1]}, oracle_disc[2]);
    auto rng = row_rng(c.scene.seed, 0);
    const double fast = capacity(e, small);
    const double oracle = capacity_oracle(e, small, rng, oracle_samples);
    c.add(CheckRow::predicate("band extremal reaches the sampled capacity", true, fast >= oracle - small.tol().mass,
                              kv("fast", fast) + " " + kv("oracle", oracle)));
  }
}

struct Entry {
  ExperimentInfo info;
  std::function<void(Ctx&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {{"T11-lelong", "Lelong numbers of full-mass potentials match the envelope's"}, run_lelong},
      {{"T11-mult", "multiplier-ideal exponents of full-mass potentials match the envelope's"}, run_mult},
      {{"T12-rwn", "full mass, zero slope, constant ray and envelope fixed point agree"}, run_rwn},
      {{"T13-additivity", "sum of potentials is full mass exactly when both summands are"}, run_additivity},
      {{"T23-beta", "exponential solutions increase to the envelope as beta grows"}, run_beta},
      {{"T27-rooftop", "rooftop envelopes and convex combinations keep finite weighted energy"}, run_rooftop},
      {{"T31-convex", "energy is convex along mollified subgeodesics"}, run_convexity},
      {{"T39-linear", "energy is affine along geodesic segments"}, run_linear},
      {{"L38-ray", "energy along a geodesic ray is t times the asymptotic slope"}, run_ray},
      {{"L310-legendre", "time Legendre slices of a ray are envelope fixed points"}, run_legendre},
      {{"C52-logconcave", "mixed masses dominate the geometric mean of masses"}, run_logconcave},
      {{"CAP-compare", "capacity bound and comparison constants over a disc family"}, run_capacity},
  };
  return list;
}

std::string registered_ids() {
  std::string s;
  for (const auto& e : entries()) s += (s.empty() ? "" : ", ") + e.info.id;
  return s;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

ExperimentReport run_experiment(const Scene& scene, const RunOptions& options) {
  const auto& list = entries();
  auto it = std::find_if(list.begin(), list.end(), [&](const Entry& e) { return e.info.id == scene.experiment_id; });
  if (it == list.end()) throw UnknownExperimentError(scene.experiment_id);

  ExperimentReport report;
  report.id = scene.experiment_id;
  report.seed = format_seed(scene.seed);
  if (options.artifact_dir) std::filesystem::create_directories(*options.artifact_dir);
  const auto start = std::chrono::steady_clock::now();
  Ctx ctx{scene, ParamReader(scene.experiment_params, "/experiment/params"), options, report};
  try {
    it->run(ctx);
  } catch (const SolverStagnation& e) {
    throw NumericalFailure(std::string("solver stagnation: ") + e.what());
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace pluri::lab
