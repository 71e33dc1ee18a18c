#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "weakcorr/grid.hpp"
#include "weakcorr/kinematics.hpp"
#include "weakcorr/state.hpp"

namespace weakcorr::cli {

enum class Representation { position, momentum, both };

struct SweepSpec {
  std::string parameter;  // a StateSpec field: sigma1, sigma2, a, b, lambda, sigma, c
  std::vector<double> values;
  std::string path = "sweep.csv";
};

struct RunConfig {
  GridSpec grid;
  PhysicsParams physics;
  StateSpec state;
  double tau = 1e-3;
  AnalysisOptions analysis;
  Representation representation = Representation::position;
  double tolerance_floor = 0.0;  // raises every identity tolerance to at least this
  std::string report_path = "report.json";
  std::optional<std::string> fields_dir;
  std::optional<SweepSpec> sweep;
};

/// Parses a run configuration. Relative state file paths are resolved
/// against base_dir. Throws ConfigurationError on bad or unknown keys.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");

/// Reads and parses a configuration file. Throws InputError when the file
/// is missing or not JSON.
RunConfig load_config(const std::string& path);

/// The configuration as JSON, with defaults filled in.
nlohmann::json to_json(const RunConfig& cfg);

/// JSON text with keys sorted and numbers printed to 17 significant digits.
std::string dump_deterministic(const nlohmann::json& doc);

/// The fixed verification battery: product, correlated, phase, general
/// Gaussians and a two-lobe cat state.
std::vector<std::pair<std::string, StateSpec>> battery_states();

/// Full analysis of the configured state.
nlohmann::json analyze_report(const RunConfig& cfg);

/// Identity suite over the built-in battery of states on the configured grid.
nlohmann::json verify_report(const RunConfig& cfg);

/// One row per sweep value. Throws UsageError for an empty sweep.
std::string sweep_csv(const RunConfig& cfg);

/// Writes the masked fields and a JSON sidecar into dir.
void write_fields(const RunConfig& cfg, const std::string& dir);

/// Entry point used by the weakcorr tool. Returns the process exit code:
/// 0 success, 1 usage or configuration error, 2 numerical failure.
int run(int argc, char** argv);

}  // namespace weakcorr::cli
