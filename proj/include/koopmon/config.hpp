#pragma once

// Run configuration: an INI document (top-level keys plus [init], [soft]
// and [model_params] sections), built-in benchmark presets and strict
// validation.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "koopmon/regularization.hpp"
#include "koopmon/sampling.hpp"
#include "koopmon/soft.hpp"

namespace koopmon {

struct RunConfig {
  std::string preset;  ///< empty when none was used
  std::string model;
  std::map<std::string, double> model_params;
  std::string method;  ///< koopmon | ehrenfest | bohmion | soft

  std::size_t n_particles = 0;
  double alpha = 0.0;
  double dt = 0.0;
  double t_final = 0.0;
  std::vector<double> snapshot_times;
  GridParams grid;
  double delta = 0.25;
  double drift_tolerance = 1e-2;
  std::size_t field_nodes = 256;
  double waterfall_interval = 0.0;

  double mu_q = 0.0;
  double mu_p = 0.0;
  double sigma_q = 0.0;
  std::string rho0 = "e1";
  std::size_t sobol_skip = 1;

  SpatialGrid1D soft_grid;
  double soft_dt = 0.0;

  /// Every key as resolved, for the manifest.
  std::map<std::string, std::string> resolved;

  bool particle_method() const { return method != "soft"; }
};

struct PresetInfo {
  std::string name;
  std::string description;
  std::map<std::string, std::string> values;
};

const std::vector<PresetInfo>& presets();
const PresetInfo& find_preset(const std::string& name);

struct ConfigSource {
  std::optional<std::string> path;
  std::optional<std::string> preset;
  std::vector<std::pair<std::string, std::string>> sets;  ///< key=value overrides
  std::optional<std::string> method;
};

/// Layering: preset, then file, then --set, then --method. Throws
/// ConfigError on parse errors (with line number), unknown keys, missing
/// required keys or invalid values.
RunConfig resolve_config(const ConfigSource& source);
RunConfig load_config(const std::string& path);

/// Spinor named by `rho0` ("e1", "e2", "plus", "ground", "excited"); the
/// adiabatic names use the model at mu_q.
std::array<cplx, 2> initial_spinor(const RunConfig& cfg);

}  // namespace koopmon
