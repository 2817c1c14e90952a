// Command-line front end: run | scan | bands | chern | field-dump.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "hhgnd/csv.hpp"
#include "hhgnd/orchestrator.hpp"
#include "hhgnd/units.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config;
  std::string output_dir;
  std::string nd;
  int workers = -1;
  int grid = -1;
  int cycles = -1;
};

void add_common(CLI::App* cmd, Overrides& o, bool simulation_flags) {
  cmd->add_option("--config", o.config, "Config file (INI) or run manifest (.json)")->required();
  cmd->add_option("--output-dir", o.output_dir, "Output directory");
  if (!simulation_flags) return;
  cmd->add_option("--nd", o.nd, "Nondipole term on|off")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--workers", o.workers, "Propagation worker threads (0 = all)");
  cmd->add_option("--grid", o.grid, "Monkhorst-Pack points per axis");
  cmd->add_option("--cycles", o.cycles, "Pulse length in optical cycles");
}

hhgnd::ConfigMap load_map(const Overrides& o) {
  hhgnd::ConfigMap map = hhgnd::read_config_map(o.config);
  if (!o.output_dir.empty()) map["output.dir"] = o.output_dir;
  if (!o.nd.empty()) map["field.nd"] = o.nd;
  if (o.workers >= 0) map["prop.workers"] = std::to_string(o.workers);
  if (o.grid >= 0) map["grid.n"] = std::to_string(o.grid);
  if (o.cycles >= 0) map["field.cycles"] = std::to_string(o.cycles);
  return map;
}

hhgnd::RunConfig load_run(const Overrides& o) {
  hhgnd::RunConfig cfg = hhgnd::run_config_from_map(load_map(o));
  cfg.resolve();
  return cfg;
}

int cmd_run(const Overrides& o) {
  const hhgnd::RunResult r = hhgnd::run(load_run(o));
  const auto& d = r.propagation.diagnostics;
  std::cout << "wrote " << r.config.output_dir << " (" << r.propagation.trace.t.size() << " samples, "
            << d.steps << " steps, " << d.workers << " workers, " << r.wall_seconds << " s)\n";
  for (const auto& w : r.model.warnings) std::cerr << "warning: " << w << '\n';
  return 0;
}

int cmd_scan(const Overrides& o, int jobs) {
  hhgnd::ScanConfig scan = hhgnd::scan_config_from_map(load_map(o));
  if (jobs > 0) scan.jobs = jobs;
  scan.resolve();
  const auto points = hhgnd::scan(scan);
  int failed = 0;
  for (const auto& p : points) {
    if (!p.ok) {
      ++failed;
      std::cerr << "point " << p.value << " failed: " << p.error << '\n';
    }
  }
  std::cout << "wrote " << scan.base.output_dir << "/helicity_map.csv (" << points.size() - failed << "/"
            << points.size() << " points)\n";
  return failed == 0 ? 0 : kExitNumerical;
}

int cmd_bands(const Overrides& o, int samples) {
  const hhgnd::RunConfig cfg = load_run(o);
  const hhgnd::LatticeModel model = hhgnd::build_model(cfg.model);
  const auto path = hhgnd::band_path(model, hhgnd::default_band_waypoints(), samples);
  const std::string out = (std::filesystem::path(cfg.output_dir) / "bands.csv").string();
  hhgnd::write_atomic(out, hhgnd::bands_csv(path));
  std::cout << "min_direct_gap_eV " << hhgnd::format_double(hhgnd::min_direct_gap(path, model.n_occupied()))
            << "\nwrote " << out << '\n';
  return 0;
}

int cmd_chern(const Overrides& o, int grid_n) {
  const hhgnd::RunConfig cfg = load_run(o);
  const hhgnd::LatticeModel model = hhgnd::build_model(cfg.model);
  if (model.blocks.size() == 1) {
    try {
      const int c = hhgnd::chern_number(model, 0, grid_n);
      std::cout << "chern " << c << '\n';
    } catch (const hhgnd::GapClosureError& e) {
      std::cout << "chern gap_closed (" << e.what() << ")\n";
    }
    return 0;
  }
  const hhgnd::ChernDiagnostic d = hhgnd::chern_diagnostic(model, grid_n);
  std::cout << "km_ratio " << hhgnd::format_double(cfg.model.km_ratio()) << '\n';
  if (d.gap_closed) {
    std::cout << "chern gap_closed\n";
  } else {
    std::cout << std::showpos << "chern spin_up=" << d.spin[0] << " spin_down=" << d.spin[1] << std::noshowpos
              << '\n';
  }
  return 0;
}

int cmd_field_dump(const Overrides& o) {
  const hhgnd::RunConfig cfg = load_run(o);
  const hhgnd::LatticeModel model = hhgnd::build_model(cfg.model);
  const hhgnd::HsFrame frame = hhgnd::hs_frame(hhgnd::reciprocal_basis(model.a1, model.a2));
  const long steps = hhgnd::step_count(cfg.field, cfg.prop);
  const double dt = cfg.prop.dt_au();
  std::ostringstream csv;
  csv << "t_au,t_fs,A_M_au,A_K_au,E_M_au,E_K_au\n";
  for (long s = 0; s <= steps; s += cfg.prop.output_stride) {
    const double t = dt * static_cast<double>(s);
    const hhgnd::FieldSample f = hhgnd::effective_field(t, cfg.field, frame);
    const hhgnd::Vec2 a = frame.project(f.a_2d);
    const hhgnd::Vec2 e = frame.project(f.e_2d);
    csv << hhgnd::format_double(t) << ',' << hhgnd::format_double(hhgnd::convert_units(t, "au_time", "fs")) << ','
        << hhgnd::format_double(a.x()) << ',' << hhgnd::format_double(a.y()) << ','
        << hhgnd::format_double(e.x()) << ',' << hhgnd::format_double(e.y()) << '\n';
  }
  const std::string out = (std::filesystem::path(cfg.output_dir) / "field.csv").string();
  hhgnd::write_atomic(out, csv.str());
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-harmonic generation in 2D tight-binding solids with nondipole driving"};
  app.require_subcommand(1);

  Overrides o;
  int jobs = 0;
  int samples = 60;
  int chern_grid = hhgnd::kChernGrid;

  auto* run = app.add_subcommand("run", "Propagate one configuration and write its artifacts");
  add_common(run, o, true);
  auto* scan = app.add_subcommand("scan", "Run a parameter scan and write helicity_map.csv");
  add_common(scan, o, true);
  scan->add_option("--jobs", jobs, "Scan points run concurrently");
  auto* bands = app.add_subcommand("bands", "Band structure along Gamma-K-M-Gamma");
  add_common(bands, o, false);
  bands->add_option("--samples", samples, "Points per path segment");
  auto* chern = app.add_subcommand("chern", "Spin-resolved Chern numbers of the model");
  add_common(chern, o, false);
  chern->add_option("--grid-n", chern_grid, "Mesh points per axis");
  auto* dump = app.add_subcommand("field-dump", "Sample A(t) and E(t) in the (Gamma-M, Gamma-K) frame");
  add_common(dump, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(o);
    if (*scan) return cmd_scan(o, jobs);
    if (*bands) return cmd_bands(o, samples);
    if (*chern) return cmd_chern(o, chern_grid);
    if (*dump) return cmd_field_dump(o);
  } catch (const hhgnd::NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const hhgnd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
