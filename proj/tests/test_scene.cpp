#include <doctest.h>

#include <filesystem>

#include "pluri/experiments.hpp"
#include "pluri/scene.hpp"

using namespace pluri;
using namespace pluri::lab;

namespace {

const char* kMinimal = R"({
  "dimension": 1,
  "slope_bodies": {"P": {"interval": [0, 1]}},
  "potentials": {"psi": {"body": "P", "preset": "log_pole", "params": {"gamma": 0.25}}},
  "experiment": {"id": "T11-mult"}
})";

std::string where_of(const std::string& text) {
  try {
    (void)parse_scene(text);
  } catch (const SceneError& e) {
    return e.where();
  }
  return "no error";
}

std::string message_of(const std::string& text) {
  try {
    (void)parse_scene(text);
  } catch (const SceneError& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST_CASE("minimal scene parses with defaults") {
  const Scene s = parse_scene(kMinimal);
  CHECK(s.dimension == 1);
  CHECK(s.seed == kDefaultSeed);
  CHECK(s.experiment_id == "T11-mult");
  const Discretization d = s.discretization(s.body("P"));
  CHECK(d.primal.points() == 513);
  CHECK(d.dual.points() == 513);
  CHECK(d.primal.half_width() == 8.0);
  CHECK(s.potential_names() == std::vector<std::string>{"psi"});
  CHECK(s.potential("psi").body() == SlopeBody::interval(0, 1));
}

TEST_CASE("syntax errors report line and column") {
  CHECK(where_of("{\n  \"dimension\": 1,,\n}").rfind("line 2", 0) == 0);
}

TEST_CASE("duplicate and unknown keys are rejected") {
  CHECK(message_of(R"({"dimension": 1, "dimension": 2})").find("duplicate") != std::string::npos);
  std::string extra = kMinimal;
  extra.insert(extra.find("\"experiment\""), "\"colour\": 3, ");
  CHECK(message_of(extra).find("unknown key 'colour'") != std::string::npos);
}

TEST_CASE("unknown presets list the catalog") {
  std::string bad = kMinimal;
  bad.replace(bad.find("log_pole"), 8, "no_such");
  const std::string msg = message_of(bad);
  CHECK(where_of(bad) == "/potentials/psi/preset");
  for (const auto& name : catalog_names()) CHECK(msg.find(name) != std::string::npos);
}

TEST_CASE("grid bounds are enforced") {
  std::string big = kMinimal;
  big.insert(big.find("\"potentials\""), "\"grid\": {\"M\": 4098}, ");
  CHECK(where_of(big) == "/grid/M");
  std::string small = kMinimal;
  small.insert(small.find("\"potentials\""), "\"grid\": {\"N\": 15}, ");
  CHECK(where_of(small) == "/grid/N");
  std::string ok = kMinimal;
  ok.insert(ok.find("\"potentials\""), "\"grid\": {\"N\": 4097, \"M\": 16, \"L\": 2}, ");
  CHECK(where_of(ok) == "no error");
}

TEST_CASE("grid override strings") {
  GridSpec g;
  apply_grid_override(g, "N=257,M=129,L=6");
  CHECK(g.primal_points == 257);
  CHECK(g.dual_points == 129);
  CHECK(g.half_width == 6.0);
  CHECK_THROWS_AS(apply_grid_override(g, "Q=3"), SceneError);
  CHECK_THROWS_AS(apply_grid_override(g, "N=abc"), SceneError);
  CHECK_THROWS_AS(apply_grid_override(g, "N"), SceneError);
}

TEST_CASE("seeds") {
  CHECK(parse_seed("0xC0FFEE") == 0xC0FFEE);
  CHECK(parse_seed("12") == 12);
  CHECK(format_seed(0xC0FFEE) == "0xc0ffee");
  CHECK_THROWS_AS(parse_seed("0xZZ"), SceneError);
  for (std::uint64_t s : {0ull, 1ull, 0xdeadbeefull, ~0ull}) CHECK(parse_seed(format_seed(s)) == s);
}

TEST_CASE("inline dual tables and shifts") {
  std::string text = R"({
    "dimension": 1,
    "slope_bodies": {"P": {"interval": [0, 1]}},
    "grid": {"N": 33, "M": 17, "L": 4},
    "potentials": {"w": {"body": "P", "dual": [)";
  for (int k = 0; k < 17; ++k) text += (k ? ", " : "") + std::string(k < 4 ? "\"inf\"" : "0");
  text += R"(], "shift": -1}},
    "experiment": {"id": "T11-mult"}
  })";
  const Scene s = parse_scene(text);
  const Potential w = s.potential("w");
  CHECK(w.dual().finite_count() == 13);
  CHECK(w.primal().values.back() == doctest::Approx(4.0 - 1.0));
  CHECK(w.primal().values.front() == doctest::Approx(-4.0 * 0.25 - 1.0));
}

TEST_CASE("experiment parameters are checked") {
  std::string bad = kMinimal;
  bad.replace(bad.find("{\"id\": \"T11-mult\"}"), 18, R"({"id": "T11-mult", "params": {"t_maks": 3}})");
  const Scene s = parse_scene(bad);
  CHECK_THROWS_AS(run_experiment(s), SceneError);
  std::string unknown = kMinimal;
  unknown.replace(unknown.find("T11-mult"), 8, "T99-none");
  CHECK_THROWS_AS(run_experiment(parse_scene(unknown)), UnknownExperimentError);
}

TEST_CASE("shipped scenes all parse") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(PLURI_SCENE_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_scene(entry.path()));
    ++count;
  }
  CHECK(count >= 13);
}
