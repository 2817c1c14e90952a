#include "hhgnd/orchestrator.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <thread>

#include "hhgnd/csv.hpp"

namespace hhgnd {

namespace {

nlohmann::json config_json(const RunConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : to_map(config)) j[key] = value;
  return j;
}

std::string grid_csv(const LatticeModel& model, const MPGrid& grid, bool reduced) {
  std::ostringstream out;
  out << (reduced ? "u,v\n" : "kx_bohr_inv,ky_bohr_inv\n");
  for (const Vec2& p : grid.points) {
    const Vec2 k = reduced ? p : to_cartesian(model, p);
    out << format_double(k.x()) << ',' << format_double(k.y()) << '\n';
  }
  return out.str();
}

std::string point_dir(const std::string& root, std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "point_%03zu", index);
  return (std::filesystem::path(root) / name).string();
}

}  // namespace

ChernDiagnostic chern_diagnostic(const LatticeModel& model, int grid_n) {
  ChernDiagnostic diag;
  try {
    for (int b = 0; b < 2 && b < static_cast<int>(model.blocks.size()); ++b) {
      diag.spin[b] = chern_number(model, b, grid_n);
    }
  } catch (const GapClosureError&) {
    diag.gap_closed = true;
    diag.spin = {0, 0};
  }
  return diag;
}

std::vector<Vec2> default_band_waypoints() {
  return {Vec2(0.0, 0.0), Vec2(1.0 / 3.0, 2.0 / 3.0), Vec2(0.5, 0.5), Vec2(0.0, 0.0)};
}

RunResult simulate(const RunConfig& input) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.config = input;
  result.config.resolve();
  const RunConfig& cfg = result.config;

  result.model = build_model(cfg.model);
  const MPGrid grid = monkhorst_pack(cfg.grid_n);
  const HsFrame frame = hs_frame(reciprocal_basis(result.model.a1, result.model.a2));
  result.propagation = propagate(result.model, grid, cfg.field, frame, cfg.prop);
  result.spectrum = fourier_spectrum(result.propagation.trace, cfg.window);
  result.bands = helicity_table(result.spectrum, cfg.nmax);
  if (cfg.model.kind == ModelKind::kKaneMele) result.chern = chern_diagnostic(result.model);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RunResult run(const RunConfig& config) {
  RunResult result = simulate(config);
  const std::filesystem::path dir(result.config.output_dir);
  std::filesystem::create_directories(dir);
  write_atomic((dir / "current.csv").string(), current_csv(result.propagation.trace));
  write_atomic((dir / "spectrum.csv").string(), spectrum_csv(result.spectrum));
  write_atomic((dir / "helicity.csv").string(), helicity_csv(result.bands));
  write_atomic((dir / "grid.csv").string(),
               grid_csv(result.model, monkhorst_pack(result.config.grid_n), result.config.reduced_output));

  const auto& diag = result.propagation.diagnostics;
  nlohmann::json manifest = {
      {"software", "hhgnd"},
      {"version", kVersion},
      {"config", config_json(result.config)},
      {"wall_time_s", result.wall_seconds},
      {"workers", diag.workers},
      {"steps", diag.steps},
      {"samples", result.propagation.trace.t.size()},
      {"diagnostics",
       {{"max_hermiticity_deviation", diag.max_hermiticity_deviation},
        {"max_trace_drift", diag.max_trace_drift},
        {"max_current_imag", diag.max_current_imag}}},
      {"warnings", result.model.warnings},
      {"outputs", {"current.csv", "spectrum.csv", "helicity.csv", "grid.csv"}},
  };
  if (result.chern) {
    manifest["chern"] = {{"grid", kChernGrid},
                         {"gap_closed", result.chern->gap_closed},
                         {"spin_up", result.chern->spin[0]},
                         {"spin_down", result.chern->spin[1]}};
  }
  write_atomic((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  return result;
}

std::string helicity_map_csv(ScanVariable variable, const std::vector<ScanPoint>& points) {
  const bool km = variable == ScanVariable::kKmRatio;
  std::ostringstream out;
  out << "value,n,helicity,power_M,power_K";
  if (km) out << ",chern_up,chern_down";
  out << '\n';
  for (const auto& p : points) {
    if (!p.ok) continue;
    for (const auto& b : p.bands) {
      out << format_double(p.value) << ',' << b.n << ',' << format_double(b.helicity) << ','
          << format_double(b.power_m) << ',' << format_double(b.power_k);
      if (km) {
        if (!p.chern || p.chern->gap_closed) {
          out << ",gap_closed,gap_closed";
        } else {
          out << ',' << p.chern->spin[0] << ',' << p.chern->spin[1];
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

std::vector<ScanPoint> scan(const ScanConfig& input) {
  ScanConfig cfg = input;
  cfg.resolve();
  const auto start = std::chrono::steady_clock::now();
  const std::string root = cfg.base.output_dir;
  std::vector<ScanPoint> points(cfg.values.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      ScanPoint& p = points[i];
      p.value = cfg.values[i];
      try {
        RunConfig point = cfg.point(p.value);
        point.output_dir = point_dir(root, i);
        const RunResult r = run(point);
        p.bands = r.bands;
        p.chern = r.chern;
        p.ok = true;
      } catch (const std::exception& e) {
        p.ok = false;
        p.error = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  write_atomic((std::filesystem::path(root) / "helicity_map.csv").string(), helicity_map_csv(cfg.variable, points));

  nlohmann::json list = nlohmann::json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    nlohmann::json entry = {{"value", points[i].value}, {"dir", point_dir(root, i)}, {"ok", points[i].ok}};
    if (!points[i].ok) entry["error"] = points[i].error;
    if (points[i].chern) {
      entry["chern"] = {{"gap_closed", points[i].chern->gap_closed},
                        {"spin_up", points[i].chern->spin[0]},
                        {"spin_down", points[i].chern->spin[1]}};
    }
    list.push_back(entry);
  }
  nlohmann::json manifest = {
      {"software", "hhgnd"},
      {"version", kVersion},
      {"scan", {{"variable", to_string(cfg.variable)}, {"values", cfg.values}, {"jobs", cfg.jobs}}},
      {"base_config", config_json(cfg.base)},
      {"points", list},
      {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
  };
  write_atomic((std::filesystem::path(root) / "manifest.json").string(), manifest.dump(2) + "\n");
  return points;
}

}  // namespace hhgnd
