// pluri-lab: command-line front end for the toric pluripotential laboratory.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or scene error,
// 3 numerical failure (solver stagnation).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "pluri/capacity.hpp"
#include "pluri/envelopes.hpp"
#include "pluri/experiments.hpp"
#include "pluri/geodesics.hpp"
#include "pluri/io.hpp"
#include "pluri/ma_solver.hpp"
#include "pluri/report.hpp"
#include "pluri/scene.hpp"

namespace {

using namespace pluri;
using namespace pluri::lab;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string out = ".";
  std::string format = "json";
  std::string grid;
  std::string seed;
  std::string body = "unit_interval";
};

void apply_thread_cap() {
  const char* env = std::getenv("LAB_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw std::invalid_argument("LAB_THREADS must be a positive integer");
  omp_set_num_threads(int(n));
}

SlopeBody parse_body_flag(const std::string& text) {
  if (text == "unit_interval") return SlopeBody::interval(0.0, 1.0);
  if (text == "unit_square") return SlopeBody::unit_square();
  if (text == "unit_triangle") return SlopeBody::unit_triangle();
  const auto comma = text.find(',');
  if (comma != std::string::npos) {
    try {
      return SlopeBody::interval(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
    } catch (const std::logic_error&) {
    }
  }
  throw std::invalid_argument("--body expects unit_interval, unit_square, unit_triangle or LO,HI");
}

/// A scene holding one body and the requested presets, used by the direct subcommands.
Scene ad_hoc_scene(const Common& common, const std::vector<std::pair<std::string, PresetParams>>& presets) {
  Scene s;
  SlopeBody body = parse_body_flag(common.body);
  s.dimension = body.dim();
  s.bodies.emplace("P", std::move(body));
  if (!common.grid.empty()) apply_grid_override(s.grid, common.grid);
  if (!common.seed.empty()) s.seed = parse_seed(common.seed);
  for (const auto& [name, params] : presets) {
    PotentialSpec pot;
    pot.body = "P";
    pot.preset = name;
    pot.params = params;
    const auto& names = catalog_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) throw UnknownPresetError(name);
    s.potentials.emplace(name, pot);
  }
  return s;
}

std::filesystem::path out_dir(const Common& common) {
  std::filesystem::path dir(common.out);
  std::filesystem::create_directories(dir);
  return dir;
}

void say(const std::string& key, double value) { std::cout << key << " = " << io::format_double(value) << '\n'; }

int cmd_catalog(const Common& common) {
  const ReportFormat fmt = parse_format(common.format);
  if (fmt == ReportFormat::json) {
    nlohmann::json doc = {{"presets", nlohmann::json::array()}, {"experiments", nlohmann::json::array()}};
    for (const auto& e : catalog_table())
      doc["presets"].push_back({{"name", e.name}, {"slope_set", e.slope_set}, {"mass", e.mass}, {"lelong", e.lelong}, {"energy", e.energy}});
    for (const auto& e : experiment_registry()) doc["experiments"].push_back({{"id", e.id}, {"summary", e.summary}});
    std::cout << doc.dump(2) << '\n';
  } else if (fmt == ReportFormat::csv) {
    std::cout << "name,slope_set,mass,lelong,energy\n";
    for (const auto& e : catalog_table())
      std::cout << e.name << ",\"" << e.slope_set << "\"," << e.mass << ',' << e.lelong << ',' << e.energy << '\n';
  } else {
    std::cout << "| preset | slope set | mass | Lelong (0 / inf) | energy |\n|---|---|---|---|---|\n";
    for (const auto& e : catalog_table())
      std::cout << "| " << e.name << " | " << e.slope_set << " | " << e.mass << " | " << e.lelong << " | " << e.energy << " |\n";
    std::cout << "\n| experiment | checks |\n|---|---|\n";
    for (const auto& e : experiment_registry()) std::cout << "| " << e.id << " | " << e.summary << " |\n";
  }
  return 0;
}

int cmd_envelope(const Common& common, const std::string& name, const PresetParams& params, const std::string& rwn_target) {
  std::vector<std::pair<std::string, PresetParams>> presets{{name, params}};
  if (!rwn_target.empty() && rwn_target != name) presets.push_back({rwn_target, {}});
  const Scene scene = ad_hoc_scene(common, presets);
  const auto disc = scene.discretization(scene.body("P"));
  const BigClass cls = BigClass::toric(disc);
  const Potential u = scene.potential(name);
  const auto dir = out_dir(common);

  io::write_primal(dir / (name + ".primal.bin"), u.primal());
  io::write_dual(dir / (name + ".dual.bin"), u.dual());
  io::write_measure_csv(dir / (name + "_measure.csv"), u);
  say("np_mass", np_mass(u));
  say("volume", cls.volume());
  std::cout << "full_mass = " << (full_mass_test(cls, u) ? "true" : "false") << '\n';
  say("energy", energy(cls, u).value);
  if (!rwn_target.empty()) {
    const RwnSweepResult r = rwn_envelope(u, scene.potential(rwn_target));
    io::write_sweep_csv(dir / (name + "_rwn_" + rwn_target + ".csv"), r, cls.tol().lt);
    std::cout << "rwn_stabilized = " << (r.stabilized ? "true" : "false") << '\n';
    say("rwn_prediction_error", r.prediction_error);
  }
  return 0;
}

int cmd_geodesic(const Common& common, const std::string& from, const std::string& to, const std::string& kind,
                 int intervals, double horizon, double eps) {
  const Scene scene = ad_hoc_scene(common, {{from, {}}, {to, {}}});
  const BigClass cls = BigClass::toric(scene.discretization(scene.body("P")));
  const Potential u0 = scene.potential(from);
  const Potential u1 = scene.potential(to);
  PotentialCurve curve;
  if (kind == "segment") curve = geodesic_segment(u0, u1, intervals);
  else if (kind == "barrier") curve = barrier_subgeodesic(u0, u1, intervals);
  else if (kind == "hmae") curve = hmae_envelope_segment(u0, u1, intervals);
  else if (kind == "ray") curve = geodesic_ray(u0, u1, horizon, intervals);
  else throw std::invalid_argument("--kind must be segment, barrier, hmae or ray");
  if (eps > 0) curve = mollify_time(curve, eps);

  const auto dir = out_dir(common);
  const std::string stem = kind + "_" + from + "_" + to;
  io::write_curve_csv(dir / (stem + ".csv"), cls, curve);
  io::write_curve(dir / (stem + ".curve.bin"), curve);
  const EnergyAlongReport e = energy_along(cls, curve);
  say("chord_deviation", e.chord_deviation);
  say("min_second_difference", e.min_second_difference);
  return 0;
}

int cmd_solve(const Common& common, const PresetParams& params, double beta, double sweep_max) {
  const Scene scene = ad_hoc_scene(common, {{"wiggle_obstacle", params}});
  const auto disc = scene.discretization(scene.body("P"));
  const auto rho = std::get<PrimalPotential>(scene.raw("wiggle_obstacle"));
  const ObstacleModel model = ObstacleModel::from(rho, disc.dual);
  const auto dir = out_dir(common);
  if (sweep_max > 0) {
    const BetaSweepReport r = beta_sweep(model, beta_ladder(sweep_max));
    io::write_beta_csv(dir / "beta_sweep.csv", r);
    std::cout << "all_ok = " << (r.all_ok() ? "true" : "false") << '\n';
    return r.all_ok() ? 0 : kExitFail;
  }
  const SolveResult s = solve_exp_ma(model, {beta, {}});
  io::write_primal(dir / "solution.primal.bin", s.u);
  std::cout << "iterations = " << s.iterations << '\n';
  say("residual", s.residual);
  return 0;
}

int cmd_capacity(const Common& common, const std::string& second, double cx, double cy, double r_min, double r_max, int count) {
  Common a = common;
  a.body = common.body == "unit_interval" ? "unit_square" : common.body;
  Common b = common;
  b.body = second;
  const Scene sa = ad_hoc_scene(a, {});
  const Scene sb = ad_hoc_scene(b, {});
  const BigClass c1 = BigClass::toric(sa.discretization(sa.body("P")));
  const BigClass c2 = BigClass::toric(sb.discretization(sb.body("P")));
  const ComparisonTable t = comparison_experiment(c1, c2, disc_family(c1.disc().primal, {cx, cy}, r_min, r_max, count));
  io::write_comparison_csv(out_dir(common) / "capacity_comparison.csv", t);
  say("C_min", t.c_min);
  say("C_max", t.c_max);
  std::cout << "all_ok = " << (t.all_ok() ? "true" : "false") << '\n';
  return t.all_ok() ? 0 : kExitFail;
}

int cmd_experiment(const Common& common, const std::string& scene_path) {
  Scene scene = load_scene(scene_path);
  if (!common.grid.empty()) apply_grid_override(scene.grid, common.grid);
  if (!common.seed.empty()) scene.seed = parse_seed(common.seed);
  const ReportFormat fmt = parse_format(common.format);
  const auto dir = out_dir(common);
  const ExperimentReport report = run_experiment(scene, {dir});
  const auto path = emit_report(report, fmt, dir);
  std::cout << report.id << ": " << report.pass_count() << "/" << report.rows.size() << " checks pass -> "
            << path.string() << '\n';
  for (const CheckRow& r : report.rows)
    if (!r.pass) std::cout << "  FAIL " << r.name << (r.detail.empty() ? "" : " (" + r.detail + ")") << '\n';
  return report.passed() ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pluri-lab: toric pluripotential experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--out", common.out, "output directory")->capture_default_str();
  app.add_option("--format", common.format, "report format: csv, json or md")->capture_default_str();
  app.add_option("--grid", common.grid, "grid override, e.g. N=513,M=513,L=8");
  app.add_option("--seed", common.seed, "seed for randomized families (decimal or 0x hex)");
  app.add_option("--body", common.body, "slope body: unit_interval, unit_square, unit_triangle or LO,HI")->capture_default_str();

  auto* catalog = app.add_subcommand("catalog", "list presets and registered experiments");

  std::string env_preset = "wiggle_obstacle";
  std::string rwn_target;
  PresetParams env_params;
  auto* envelope = app.add_subcommand("envelope", "project a preset and dump its measure and transforms");
  envelope->add_option("preset", env_preset, "catalog preset")->capture_default_str();
  envelope->add_option("--gamma", env_params.gamma, "log_pole deficiency");
  envelope->add_option("--amplitude", env_params.amplitude, "wiggle_obstacle bump height");
  envelope->add_option("--sigma", env_params.sigma, "wiggle_obstacle bump width");
  envelope->add_option("--rwn", rwn_target, "also sweep the singularity-type envelope toward this preset");

  std::string geo_from = "support_fn", geo_to = "entropy", geo_kind = "segment";
  int geo_intervals = 64;
  double geo_horizon = 8.0, geo_eps = 0.0;
  auto* geodesic = app.add_subcommand("geodesic", "build a curve of potentials and its energy profile");
  geodesic->add_option("from", geo_from, "start preset")->capture_default_str();
  geodesic->add_option("to", geo_to, "end preset (ray target for --kind ray)")->capture_default_str();
  geodesic->add_option("--kind", geo_kind, "segment, barrier, hmae or ray")->capture_default_str();
  geodesic->add_option("--intervals", geo_intervals, "time intervals")->capture_default_str();
  geodesic->add_option("--horizon", geo_horizon, "ray horizon")->capture_default_str();
  geodesic->add_option("--eps", geo_eps, "time mollification half-width (0 = none)")->capture_default_str();

  PresetParams solve_params;
  double solve_beta = 1.0, solve_sweep = 0.0;
  auto* solve = app.add_subcommand("solve-ma", "solve the exponential Monge-Ampere equation on wiggle_obstacle");
  solve->add_option("--beta", solve_beta, "exponent")->capture_default_str();
  solve->add_option("--sweep", solve_sweep, "run the beta ladder 1, 2, ..., up to this value");
  solve->add_option("--amplitude", solve_params.amplitude, "bump height");
  solve->add_option("--sigma", solve_params.sigma, "bump width");

  std::string cap_second = "unit_triangle";
  double cap_cx = 2.0, cap_cy = 2.0, cap_rmin = 0.25, cap_rmax = 1.5;
  int cap_count = 10;
  auto* cap = app.add_subcommand("capacity", "compare capacities of two bodies over a disc family");
  cap->add_option("--second", cap_second, "second body")->capture_default_str();
  cap->add_option("--cx", cap_cx, "disc centre x")->capture_default_str();
  cap->add_option("--cy", cap_cy, "disc centre y")->capture_default_str();
  cap->add_option("--r-min", cap_rmin, "smallest radius")->capture_default_str();
  cap->add_option("--r-max", cap_rmax, "largest radius")->capture_default_str();
  cap->add_option("--count", cap_count, "number of discs")->capture_default_str();

  std::string scene_path;
  auto* experiment = app.add_subcommand("experiment", "scene-driven experiments");
  experiment->require_subcommand(1);
  auto* run = experiment->add_subcommand("run", "run the experiment described by a scene file");
  run->add_option("scene", scene_path, "scene JSON")->required()->check(CLI::ExistingFile);
  run->fallthrough();
  experiment->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    apply_thread_cap();
    if (*catalog) return cmd_catalog(common);
    if (*envelope) return cmd_envelope(common, env_preset, env_params, rwn_target);
    if (*geodesic) return cmd_geodesic(common, geo_from, geo_to, geo_kind, geo_intervals, geo_horizon, geo_eps);
    if (*solve) return cmd_solve(common, solve_params, solve_beta, solve_sweep);
    if (*cap) return cmd_capacity(common, cap_second, cap_cx, cap_cy, cap_rmin, cap_rmax, cap_count);
    if (*run) return cmd_experiment(common, scene_path);
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SolverStagnation& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SceneError& e) {
    std::cerr << "scene error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const io::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
