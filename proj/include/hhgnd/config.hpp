#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hhgnd/field.hpp"
#include "hhgnd/lattice.hpp"
#include "hhgnd/sbe.hpp"
#include "hhgnd/spectroscopy.hpp"

namespace hhgnd {

/// Schema violation in a run or scan configuration. The message names the key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ModelSpec model;
  /// Kane-Mele only: when set, delta_a is derived as km_ratio * 3 sqrt(3) t2.
  std::optional<double> km_ratio;
  int grid_n = 300;
  bool reduced_output = false;
  PulseParams field;
  PropagationParams prop;
  Window window = Window::kHann;
  int nmax = 20;
  std::string output_dir = "output";

  /// Applies km_ratio and checks every section invariant. Throws ConfigError.
  void resolve();
};

/// Points in a start/stop scan when scan.count is omitted.
inline constexpr int kDefaultScanPoints = 24;

enum class ScanVariable { kDeltaA, kLambda, kKmRatio };

ScanVariable parse_scan_variable(const std::string& name);
std::string to_string(ScanVariable variable);

struct ScanConfig {
  ScanVariable variable = ScanVariable::kDeltaA;
  std::vector<double> values;
  RunConfig base;
  int jobs = 1;

  void resolve();
  /// Base configuration with the scanned variable set to `value`.
  RunConfig point(double value) const;
};

/// Flat "section.key" -> text map, the common form of INI files and manifests.
using ConfigMap = std::map<std::string, std::string>;

/// Reads an INI file ([section] headers, key = value) or, for a .json path,
/// the "config" object of a run manifest.
ConfigMap read_config_map(const std::string& path);

/// Builds a run config from the map. Unknown keys are hard errors; [scan]
/// keys are checked against the schema but otherwise ignored.
RunConfig run_config_from_map(const ConfigMap& map);
ScanConfig scan_config_from_map(const ConfigMap& map);

RunConfig load_run_config(const std::string& path);
ScanConfig load_scan_config(const std::string& path);

/// Every resolved run parameter, including defaults, as a flat map.
ConfigMap to_map(const RunConfig& config);

}  // namespace hhgnd
