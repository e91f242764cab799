#include "pluri/scene.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pluri/envelopes.hpp"
#include "pluri/io.hpp"

namespace pluri::lab {

using nlohmann::json;

SceneError::SceneError(std::string where, const std::string& message)
    : std::runtime_error(where.empty() ? message : where + ": " + message), where_(std::move(where)) {}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : ", ") + i;
  return s;
}

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

void only_keys(const json& obj, const std::string& path, const std::vector<std::string>& allowed) {
  if (!obj.is_object()) throw SceneError(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw SceneError(child(path, key), "unknown key '" + key + "' (allowed: " + join(allowed) + ")");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SceneError(child(path, key), "missing required key");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SceneError(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SceneError(path, "expected an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SceneError(path, "expected a string");
  return v.get<std::string>();
}

/// Numbers, or the strings "inf" / "+inf" for slopes outside the domain.
double as_extended(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    throw SceneError(path, "expected a number or \"inf\"");
  }
  return as_number(v, path);
}

std::pair<double, double> as_pair(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw SceneError(path, "expected [lo, hi]");
  return {as_number(v[0], child(path, 0)), as_number(v[1], child(path, 1))};
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

/// Parses strictly: duplicate keys are rejected.
json parse_strict(std::string_view text) {
  std::vector<std::set<std::string>> open;
  std::vector<std::string> trail;
  auto guard = [&](int, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::object_start) {
      open.emplace_back();
      trail.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      open.pop_back();
      trail.pop_back();
    } else if (event == json::parse_event_t::key) {
      const auto key = parsed.get<std::string>();
      trail.back() = key;
      if (!open.back().insert(key).second) {
        std::string where;
        for (const auto& k : trail) where += "/" + k;
        throw SceneError(where, "duplicate key");
      }
    }
    return true;
  };
  try {
    return json::parse(text.begin(), text.end(), guard);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw SceneError(line_col(text, e.byte), msg);
  }
}

SlopeBody parse_body(const json& node, const std::string& path) {
  only_keys(node, path, {"interval", "polygon", "preset"});
  if (node.size() != 1) throw SceneError(path, "give exactly one of interval, polygon, preset");
  try {
    if (node.contains("interval")) {
      const auto [lo, hi] = as_pair(node["interval"], child(path, "interval"));
      return SlopeBody::interval(lo, hi);
    }
    if (node.contains("polygon")) {
      const json& arr = node["polygon"];
      const std::string ppath = child(path, "polygon");
      if (!arr.is_array()) throw SceneError(ppath, "expected a list of [x, y] vertices");
      std::vector<Vec2> verts;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto [x, y] = as_pair(arr[i], child(ppath, i));
        verts.push_back({x, y});
      }
      return SlopeBody::polygon(std::move(verts));
    }
    const std::string name = as_string(node["preset"], child(path, "preset"));
    if (name == "unit_interval") return SlopeBody::interval(0.0, 1.0);
    if (name == "unit_square") return SlopeBody::unit_square();
    if (name == "unit_triangle") return SlopeBody::unit_triangle();
    throw SceneError(child(path, "preset"), "unknown body preset '" + name + "' (known: unit_interval, unit_square, unit_triangle)");
  } catch (const GeometryError& e) {
    throw SceneError(path, e.what());
  }
}

GridSpec parse_grid(const json& node, const std::string& path) {
  only_keys(node, path, {"L", "N", "M"});
  GridSpec g;
  if (node.contains("L")) g.half_width = as_number(node["L"], child(path, "L"));
  if (node.contains("N")) g.primal_points = as_int(node["N"], child(path, "N"));
  if (node.contains("M")) g.dual_points = as_int(node["M"], child(path, "M"));
  return g;
}

void check_grid(const GridSpec& g, const std::string& path) {
  auto bounded = [&](const std::optional<int>& v, const char* key) {
    if (v && (*v < kMinGridPoints || *v > kMaxGridPoints))
      throw SceneError(child(path, key), std::string(key) + " = " + std::to_string(*v) + " outside [" +
                                              std::to_string(kMinGridPoints) + ", " + std::to_string(kMaxGridPoints) + "]");
  };
  bounded(g.primal_points, "N");
  bounded(g.dual_points, "M");
  if (g.half_width && !(*g.half_width > 0)) throw SceneError(child(path, "L"), "L must be positive");
}

PresetParams parse_preset_params(const json& node, const std::string& path, const Scene& scene) {
  only_keys(node, path, {"gamma", "amplitude", "sigma", "sub", "slopes"});
  PresetParams p;
  if (node.contains("gamma")) p.gamma = as_number(node["gamma"], child(path, "gamma"));
  if (node.contains("amplitude")) p.amplitude = as_number(node["amplitude"], child(path, "amplitude"));
  if (node.contains("sigma")) p.sigma = as_number(node["sigma"], child(path, "sigma"));
  if (node.contains("slopes")) p.slopes = as_pair(node["slopes"], child(path, "slopes"));
  if (node.contains("sub")) {
    const std::string name = as_string(node["sub"], child(path, "sub"));
    auto it = scene.bodies.find(name);
    if (it == scene.bodies.end()) throw SceneError(child(path, "sub"), "unknown slope body '" + name + "'");
    p.sub = it->second;
  }
  return p;
}

PotentialSpec parse_potential(const json& node, const std::string& path, const Scene& scene) {
  only_keys(node, path, {"body", "preset", "params", "dual", "primal", "file", "file_kind", "shift"});
  PotentialSpec p;
  p.body = as_string(require(node, "body", path), child(path, "body"));
  if (!scene.bodies.contains(p.body)) throw SceneError(child(path, "body"), "unknown slope body '" + p.body + "'");

  int sources = 0;
  for (const char* k : {"preset", "dual", "primal", "file"}) sources += node.contains(k) ? 1 : 0;
  if (sources != 1) throw SceneError(path, "give exactly one of preset, dual, primal, file");
  if (node.contains("params") && !node.contains("preset")) throw SceneError(child(path, "params"), "params apply to presets only");
  if (node.contains("file_kind") && !node.contains("file")) throw SceneError(child(path, "file_kind"), "file_kind applies to file sources only");

  if (node.contains("preset")) {
    p.source = PotentialSource::preset;
    p.preset = as_string(node["preset"], child(path, "preset"));
    const auto& names = catalog_names();
    if (std::find(names.begin(), names.end(), p.preset) == names.end())
      throw SceneError(child(path, "preset"), UnknownPresetError(p.preset).what());
    if (node.contains("params")) p.params = parse_preset_params(node["params"], child(path, "params"), scene);
  } else if (node.contains("file")) {
    p.source = PotentialSource::file;
    p.file = as_string(node["file"], child(path, "file"));
    p.file_kind = node.contains("file_kind") ? as_string(node["file_kind"], child(path, "file_kind")) : "dual";
    if (p.file_kind != "dual" && p.file_kind != "primal")
      throw SceneError(child(path, "file_kind"), "expected \"dual\" or \"primal\"");
  } else {
    const bool dual = node.contains("dual");
    p.source = dual ? PotentialSource::dual : PotentialSource::primal;
    const std::string key = dual ? "dual" : "primal";
    const json& arr = node[key];
    if (!arr.is_array()) throw SceneError(child(path, key), "expected a list of values");
    for (std::size_t i = 0; i < arr.size(); ++i)
      p.values.push_back(dual ? as_extended(arr[i], child(child(path, key), i)) : as_number(arr[i], child(child(path, key), i)));
  }
  if (node.contains("shift")) p.shift = as_number(node["shift"], child(path, "shift"));
  return p;
}

}  // namespace

void apply_grid_override(GridSpec& grid, std::string_view text) {
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw SceneError("--grid", "expected KEY=VALUE, got '" + std::string(item) + "'");
    const std::string key(item.substr(0, eq));
    const std::string value(item.substr(eq + 1));
    std::size_t used = 0;
    try {
      if (key == "L") {
        grid.half_width = std::stod(value, &used);
      } else if (key == "N" || key == "M") {
        (key == "N" ? grid.primal_points : grid.dual_points) = std::stoi(value, &used);
      } else {
        throw SceneError("--grid", "unknown grid key '" + key + "' (known: N, M, L)");
      }
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw SceneError("--grid", "bad value for " + key + ": '" + value + "'");
  }
  check_grid(grid, "--grid");
}

ParamReader::ParamReader(const json& params, std::string path) : params_(params), path_(std::move(path)) {
  if (!params_.is_object()) throw SceneError(path_, "expected an object");
}

bool ParamReader::has(const std::string& key) const { return params_.contains(key); }

const json* ParamReader::lookup(const std::string& key) {
  used_.insert(key);
  auto it = params_.find(key);
  return it == params_.end() ? nullptr : &*it;
}

double ParamReader::number(const std::string& key, double fallback) {
  const json* v = lookup(key);
  return v ? as_number(*v, child(path_, key)) : fallback;
}

int ParamReader::integer(const std::string& key, int fallback) {
  const json* v = lookup(key);
  return v ? as_int(*v, child(path_, key)) : fallback;
}

std::string ParamReader::text(const std::string& key, const std::string& fallback) {
  const json* v = lookup(key);
  return v ? as_string(*v, child(path_, key)) : fallback;
}

std::vector<std::string> ParamReader::names(const std::string& key, const std::vector<std::string>& fallback) {
  const json* v = lookup(key);
  if (!v) return fallback;
  if (!v->is_array()) throw SceneError(child(path_, key), "expected a list of names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_string((*v)[i], child(child(path_, key), i)));
  return out;
}

std::vector<double> ParamReader::numbers(const std::string& key, const std::vector<double>& fallback) {
  const json* v = lookup(key);
  if (!v) return fallback;
  if (!v->is_array()) throw SceneError(child(path_, key), "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_number((*v)[i], child(child(path_, key), i)));
  return out;
}

void ParamReader::finish() const {
  for (const auto& [key, _] : params_.items())
    if (!used_.contains(key)) throw SceneError(child(path_, key), "unknown parameter '" + key + "'");
}

const SlopeBody& Scene::body(const std::string& name) const {
  auto it = bodies.find(name);
  if (it == bodies.end()) throw SceneError("/slope_bodies", "unknown slope body '" + name + "'");
  return it->second;
}

Discretization Scene::discretization(const SlopeBody& b) const {
  const bool one = b.dim() == 1;
  return Discretization::make(b, grid.half_width.value_or(one ? 8.0 : 4.0), grid.primal_points.value_or(one ? 513 : 129),
                              grid.dual_points.value_or(one ? 513 : 129));
}

std::vector<std::string> Scene::potential_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : potentials) out.push_back(name);
  return out;
}

PresetValue Scene::raw(const std::string& name) const {
  auto it = potentials.find(name);
  if (it == potentials.end()) throw SceneError("/potentials", "unknown potential '" + name + "' (have: " + join(potential_names()) + ")");
  const PotentialSpec& s = it->second;
  const std::string path = "/potentials/" + name;
  const Discretization disc = discretization(body(s.body));

  PresetValue value = [&]() -> PresetValue {
    switch (s.source) {
      case PotentialSource::preset:
        try {
          return preset(s.preset, s.params, disc);
        } catch (const std::invalid_argument& e) {
          throw SceneError(path, e.what());
        }
      case PotentialSource::dual: {
        if (s.values.size() != disc.dual.size())
          throw SceneError(child(path, "dual"), "expected " + std::to_string(disc.dual.size()) + " values, got " + std::to_string(s.values.size()));
        DualPotential w{disc.dual, s.values, {}};
        for (std::size_t k = 0; k < w.values.size(); ++k)
          if (!disc.dual.inside(k)) w.values[k] = kInf;
        if (w.finite_count() == 0) throw SceneError(child(path, "dual"), "no finite value inside the body");
        return Potential::from_dual(std::move(w), disc.primal, name);
      }
      case PotentialSource::primal: {
        if (s.values.size() != disc.primal.size())
          throw SceneError(child(path, "primal"), "expected " + std::to_string(disc.primal.size()) + " values, got " + std::to_string(s.values.size()));
        PrimalPotential f{disc.primal, s.values, SlopeWindow::of(disc.dual.body()), false};
        return project(f, disc.dual).with_label(name);
      }
      case PotentialSource::file: {
        const auto file = s.file.is_absolute() ? s.file : base_dir / s.file;
        try {
          if (s.file_kind == "primal") {
            PrimalPotential u = io::read_primal(file, disc.dual.body());
            if (!(u.grid == disc.primal)) throw SceneError(child(path, "file"), "primal dump grid differs from the scene grid");
            return Potential::from_primal(std::move(u), disc.dual, name);
          }
          DualPotential w = io::read_dual(file, disc.dual.body());
          if (!(w.grid == disc.dual)) throw SceneError(child(path, "file"), "dual dump grid differs from the scene grid");
          return Potential::from_dual(std::move(w), disc.primal, name);
        } catch (const io::IoError& e) {
          throw SceneError(child(path, "file"), e.what());
        }
      }
    }
    throw SceneError(path, "unhandled source");
  }();

  if (s.shift != 0.0) {
    if (auto* p = std::get_if<Potential>(&value)) return p->shifted(s.shift);
    for (double& v : std::get<PrimalPotential>(value).values) v += s.shift;
  }
  return value;
}

Potential Scene::potential(const std::string& name) const {
  PresetValue v = raw(name);
  if (auto* p = std::get_if<Potential>(&v)) return std::move(*p);
  auto& rho = std::get<PrimalPotential>(v);
  const auto disc = discretization(body(potentials.at(name).body));
  return Potential::from_primal(convex_envelope(rho, disc.dual), disc.dual, name);
}

std::string format_seed(std::uint64_t seed) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(seed));
  return buf;
}

std::uint64_t parse_seed(std::string_view text) {
  const bool hex = text.starts_with("0x") || text.starts_with("0X");
  const std::string_view digits = hex ? text.substr(2) : text;
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, hex ? 16 : 10);
  if (digits.empty() || ec != std::errc{} || end != digits.data() + digits.size())
    throw SceneError("/seed", "bad seed '" + std::string(text) + "'");
  return value;
}

Scene parse_scene(std::string_view text, const std::filesystem::path& base_dir) {
  const json doc = parse_strict(text);
  only_keys(doc, "", {"dimension", "slope_bodies", "grid", "potentials", "experiment", "seed"});

  Scene scene;
  scene.base_dir = base_dir;
  scene.dimension = as_int(require(doc, "dimension", ""), "/dimension");
  if (scene.dimension != 1 && scene.dimension != 2) throw SceneError("/dimension", "dimension must be 1 or 2");

  const json& bodies = require(doc, "slope_bodies", "");
  if (!bodies.is_object() || bodies.empty()) throw SceneError("/slope_bodies", "expected a non-empty object");
  for (const auto& [name, node] : bodies.items()) {
    SlopeBody b = parse_body(node, "/slope_bodies/" + name);
    if (b.dim() != scene.dimension)
      throw SceneError("/slope_bodies/" + name, "body dimension " + std::to_string(b.dim()) + " differs from the scene dimension");
    scene.bodies.emplace(name, std::move(b));
  }

  if (doc.contains("grid")) scene.grid = parse_grid(doc["grid"], "/grid");
  check_grid(scene.grid, "/grid");

  if (doc.contains("potentials")) {
    const json& pots = doc["potentials"];
    if (!pots.is_object()) throw SceneError("/potentials", "expected an object");
    for (const auto& [name, node] : pots.items())
      scene.potentials.emplace(name, parse_potential(node, "/potentials/" + name, scene));
  }

  const json& exp = require(doc, "experiment", "");
  only_keys(exp, "/experiment", {"id", "params"});
  scene.experiment_id = as_string(require(exp, "id", "/experiment"), "/experiment/id");
  if (exp.contains("params")) {
    if (!exp["params"].is_object()) throw SceneError("/experiment/params", "expected an object");
    scene.experiment_params = exp["params"];
  }

  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (s.is_number_unsigned()) scene.seed = s.get<std::uint64_t>();
    else if (s.is_string()) scene.seed = parse_seed(s.get<std::string>());
    else throw SceneError("/seed", "expected a non-negative integer or a hex string");
  }
  return scene;
}

Scene load_scene(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SceneError(file.string(), "cannot open scene file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str(), file.parent_path());
}

}  // namespace pluri::lab
