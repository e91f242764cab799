#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pluri/scene.hpp"

namespace pluri::lab {

/// One check. Value rows pass when |expected - observed| <= tolerance; predicate rows
/// store booleans as 0/1 and pass when observed equals expected.
struct CheckRow {
  enum class Kind { value, predicate };

  std::string name;
  Kind kind = Kind::value;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;

  static CheckRow value(std::string name, double expected, double observed, double tolerance, std::string detail = {});
  static CheckRow predicate(std::string name, bool expected, bool observed, std::string detail = {});
};

struct ExperimentReport {
  std::string id;
  std::string seed;  ///< hex form of the scene seed
  std::vector<CheckRow> rows;
  std::vector<std::string> artifacts;  ///< file names relative to the output directory
  double wall_seconds = 0.0;

  bool passed() const;
  std::size_t pass_count() const;
};

/// Raised for solver stagnation or other breakdowns that are not check failures.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownExperimentError : public std::invalid_argument {
 public:
  explicit UnknownExperimentError(const std::string& id);
};

struct ExperimentInfo {
  std::string id;
  std::string summary;
};
const std::vector<ExperimentInfo>& experiment_registry();

struct RunOptions {
  /// CSV artifacts are written here when set.
  std::optional<std::filesystem::path> artifact_dir;
};

ExperimentReport run_experiment(const Scene& scene, const RunOptions& options = {});

}  // namespace pluri::lab
