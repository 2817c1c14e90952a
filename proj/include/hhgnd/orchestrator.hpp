#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hhgnd/chern.hpp"
#include "hhgnd/config.hpp"

namespace hhgnd {

inline constexpr const char* kVersion = "0.1.0";
/// Mesh used for the spin-resolved Chern diagnostic attached to Kane-Mele runs.
inline constexpr int kChernGrid = 24;

struct ChernDiagnostic {
  bool gap_closed = false;
  std::array<int, 2> spin{0, 0};  // spin-up, spin-down block
};

struct RunResult {
  RunConfig config;
  LatticeModel model;
  PropagationResult propagation;
  Spectrum spectrum;
  std::vector<HarmonicBand> bands;
  std::optional<ChernDiagnostic> chern;
  double wall_seconds = 0.0;
};

/// Full pipeline without touching the filesystem.
RunResult simulate(const RunConfig& config);

/// simulate() plus current.csv, spectrum.csv, helicity.csv and manifest.json
/// (and grid.csv) in config.output_dir, each written atomically.
RunResult run(const RunConfig& config);

struct ScanPoint {
  double value = 0.0;
  bool ok = false;
  std::string error;
  std::vector<HarmonicBand> bands;
  std::optional<ChernDiagnostic> chern;
};

/// Runs every scan value (up to `jobs` concurrently) into point_NNN
/// subdirectories, then writes helicity_map.csv and manifest.json.
/// A failing point is recorded and the remaining points continue.
std::vector<ScanPoint> scan(const ScanConfig& config);

ChernDiagnostic chern_diagnostic(const LatticeModel& model, int grid_n = kChernGrid);

/// Gamma-K-M-Gamma in reduced coordinates.
std::vector<Vec2> default_band_waypoints();

std::string helicity_map_csv(ScanVariable variable, const std::vector<ScanPoint>& points);

}  // namespace hhgnd
