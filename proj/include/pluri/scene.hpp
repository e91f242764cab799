#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pluri/presets.hpp"

namespace pluri::lab {

/// Parse or validation failure. `where` is "line L, column C" for syntax errors and a
/// JSON pointer such as "/potentials/psi/preset" for validation errors.
class SceneError : public std::runtime_error {
 public:
  SceneError(std::string where, const std::string& message);
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

inline constexpr int kMinGridPoints = 16;
inline constexpr int kMaxGridPoints = 4097;
inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

/// Grid overrides; unset fields fall back to the per-dimension defaults.
struct GridSpec {
  std::optional<double> half_width;
  std::optional<int> primal_points;
  std::optional<int> dual_points;
};

/// Applies "N=..,M=..,L=.." on top of `grid`; throws SceneError on malformed input.
void apply_grid_override(GridSpec& grid, std::string_view text);

enum class PotentialSource { preset, dual, primal, file };

struct PotentialSpec {
  std::string body;
  PotentialSource source = PotentialSource::preset;
  std::string preset;
  PresetParams params;
  std::vector<double> values;   ///< inline dual or primal table
  std::filesystem::path file;   ///< binary dump, resolved against the scene directory
  std::string file_kind;        ///< "dual" or "primal"
  double shift = 0.0;
};

/// Typed access to an experiment's parameter object. Every key must be consumed
/// before `finish()`, which rejects the rest.
class ParamReader {
 public:
  ParamReader(const nlohmann::json& params, std::string path);

  bool has(const std::string& key) const;
  double number(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<std::string> names(const std::string& key, const std::vector<std::string>& fallback);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  void finish() const;

 private:
  const nlohmann::json* lookup(const std::string& key);
  const nlohmann::json& params_;
  std::string path_;
  std::set<std::string> used_;
};

struct Scene {
  int dimension = 1;
  std::map<std::string, SlopeBody> bodies;
  GridSpec grid;
  std::map<std::string, PotentialSpec> potentials;
  std::string experiment_id;
  nlohmann::json experiment_params = nlohmann::json::object();
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path base_dir;

  const SlopeBody& body(const std::string& name) const;
  Discretization discretization(const SlopeBody& body) const;
  /// Raw obstacles come back convexified.
  Potential potential(const std::string& name) const;
  /// Preset output before projection; non-preset sources always give a Potential.
  PresetValue raw(const std::string& name) const;
  /// Names of all potentials in key order.
  std::vector<std::string> potential_names() const;
};

Scene parse_scene(std::string_view text, const std::filesystem::path& base_dir = {});
Scene load_scene(const std::filesystem::path& file);

/// "0x" followed by lowercase hex digits.
std::string format_seed(std::uint64_t seed);
/// Accepts decimal or 0x-prefixed hex.
std::uint64_t parse_seed(std::string_view text);

}  // namespace pluri::lab
