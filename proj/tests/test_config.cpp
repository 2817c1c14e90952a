#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hhgnd/config.hpp"
#include "hhgnd/csv.hpp"

using namespace hhgnd;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "hhgnd_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path.string();
}

RunConfig resolved(const ConfigMap& map) {
  RunConfig c = run_config_from_map(map);
  c.resolve();
  return c;
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = resolved({});
  CHECK(c.model.kind == ModelKind::kGraphene);
  CHECK(c.model.t1 == 2.94);
  CHECK(c.model.delta_a == 0.0);
  CHECK(c.grid_n == 300);
  CHECK(c.field.e0_v_per_m == 4e9);
  CHECK(c.field.lambda_m == doctest::Approx(3.2e-6).epsilon(1e-15));
  CHECK(c.field.n_cycles == 20);
  CHECK(c.field.nd_enabled);
  CHECK(c.prop.dt_as == 2.5);
  CHECK(c.prop.tau_fs == 2.0);
  CHECK(c.prop.dephasing_basis == DephasingBasis::kEigen);
  CHECK(c.window == Window::kHann);
  CHECK(c.nmax == 20);

  const RunConfig h = resolved({{"model.kind", "hbn"}});
  CHECK(h.model.delta_a == 2.81);
}

TEST_CASE("INI parsing") {
  const std::string path = write_temp("run.ini",
                                      "[model]\nkind = kane_mele\nkm_ratio = 0.5\n\n"
                                      "[grid]\nn = 48\n\n[field]\nlambda_um = 1.6\nnd = off\ncycles = 10\n\n"
                                      "[prop]\ndt_as = 5\ndephasing_basis = wannier\n\n[output]\ndir = /tmp/x\n");
  const RunConfig c = load_run_config(path);
  CHECK(c.model.kind == ModelKind::kKaneMele);
  CHECK(c.model.t2 == doctest::Approx(0.03 * 2.94).epsilon(1e-15));
  CHECK(c.model.km_ratio() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.grid_n == 48);
  CHECK(c.field.lambda_m == doctest::Approx(1.6e-6).epsilon(1e-15));
  CHECK_FALSE(c.field.nd_enabled);
  CHECK(c.field.n_cycles == 10);
  CHECK(c.prop.dt_as == 5.0);
  CHECK(c.prop.dephasing_basis == DephasingBasis::kWannier);
  CHECK(c.output_dir == "/tmp/x");
}

TEST_CASE("schema violations name the key") {
  auto fails_with = [](const ConfigMap& map, const std::string& key) {
    try {
      resolved(map);
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(key) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_with({{"model.colour", "red"}}, "model.colour"));
  CHECK(fails_with({{"grid.n", "abc"}}, "grid.n"));
  CHECK(fails_with({{"grid.n", "1"}}, "grid.n"));
  CHECK(fails_with({{"grid.n", "12.5"}}, "grid.n"));
  CHECK(fails_with({{"prop.tau_fs", "0"}}, "prop"));
  CHECK(fails_with({{"prop.dt_as", "-1"}}, "prop"));
  CHECK(fails_with({{"prop.dephasing_basis", "bloch"}}, "prop.dephasing_basis"));
  CHECK(fails_with({{"field.e0_gv_per_m", "0"}}, "field"));
  CHECK(fails_with({{"field.nd", "maybe"}}, "field.nd"));
  CHECK(fails_with({{"field.lambda_um", "nan"}}, "field.lambda_um"));
  CHECK(fails_with({{"spec.window", "box"}}, "spec.window"));
  CHECK(fails_with({{"spec.nmax", "0"}}, "spec.nmax"));
  CHECK(fails_with({{"model.kind", "kagome"}}, "model.kind"));
  CHECK(fails_with({{"model.kind", "kane_mele"}}, "model.delta_a_ev"));
  CHECK(fails_with({{"model.kind", "kane_mele"}, {"model.km_ratio", "1"}, {"model.delta_a_ev", "0"}}, "model.km_ratio"));
  CHECK(fails_with({{"model.km_ratio", "0.5"}}, "model.km_ratio"));
  CHECK(fails_with({{"model.kind", "hbn"}, {"model.delta_a_ev", "-1"}}, "model"));
  CHECK(fails_with({{"output.dir", ""}}, "output.dir"));
}

TEST_CASE("INI file errors") {
  CHECK_THROWS_AS(read_config_map("/nonexistent/config.ini"), ConfigError);
  CHECK_THROWS_AS(read_config_map(write_temp("flat.ini", "kind = hbn\n")), ConfigError);
  CHECK_THROWS_AS(read_config_map(write_temp("broken.ini", "[model\nkind = hbn\n")), ConfigError);
  CHECK_THROWS_AS(read_config_map(write_temp("bad.json", "{\"software\": 1}")), ConfigError);
  CHECK_THROWS_AS(read_config_map(write_temp("bad2.json", "{not json")), ConfigError);
}

TEST_CASE("resolved map round-trips exactly") {
  for (const ConfigMap& input : {ConfigMap{}, ConfigMap{{"model.kind", "hbn"}, {"field.lambda_um", "2.4"}},
                                 ConfigMap{{"model.kind", "kane_mele"}, {"model.km_ratio", "0.3"}, {"field.cep_rad", "0.1"}}}) {
    const RunConfig a = resolved(input);
    const ConfigMap m = to_map(a);
    const RunConfig b = resolved(m);
    CHECK(to_map(b) == m);
    CHECK(b.model.delta_a == a.model.delta_a);
    CHECK(b.field.lambda_m == a.field.lambda_m);
    CHECK(b.field.e0_v_per_m == a.field.e0_v_per_m);
  }
}

TEST_CASE("manifest config objects are accepted") {
  const RunConfig a = resolved({{"model.kind", "hbn"}, {"grid.n", "30"}});
  std::string json = "{\"software\": \"hhgnd\", \"config\": {";
  bool first = true;
  for (const auto& [k, v] : to_map(a)) {
    json += (first ? "\"" : ",\"") + k + "\": \"" + v + "\"";
    first = false;
  }
  json += "}}";
  const ConfigMap m = read_config_map(write_temp("manifest.json", json));
  CHECK(m == to_map(a));
}

TEST_CASE("scan configurations") {
  SUBCASE("explicit list over delta_a") {
    ScanConfig s = scan_config_from_map({{"scan.variable", "delta_a"}, {"scan.values", "0, 1.5, 2.81"}, {"grid.n", "12"}});
    s.resolve();
    REQUIRE(s.values.size() == 3);
    CHECK(s.point(0.0).model.kind == ModelKind::kGraphene);
    CHECK(s.point(1.5).model.kind == ModelKind::kHbn);
    CHECK(s.point(1.5).model.delta_a == 1.5);
    CHECK(s.point(1.5).grid_n == 12);
  }
  SUBCASE("range over km_ratio") {
    ScanConfig s = scan_config_from_map(
        {{"scan.variable", "km_ratio"}, {"scan.start", "0.25"}, {"scan.stop", "3"}, {"scan.count", "12"}, {"model.kind", "kane_mele"}});
    s.resolve();
    REQUIRE(s.values.size() == 12);
    CHECK(s.values.front() == 0.25);
    CHECK(s.values.back() == 3.0);
    RunConfig p = s.point(2.0);
    p.resolve();
    CHECK(p.model.km_ratio() == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("default graphene to hBN path") {
    ScanConfig s = scan_config_from_map({{"scan.variable", "delta_a"}});
    s.resolve();
    REQUIRE(s.values.size() == 24);
    CHECK(s.values.front() == 0.0);
    CHECK(s.values.back() == 2.81);
    ScanConfig r = scan_config_from_map({{"scan.variable", "lambda"}, {"scan.start", "2"}, {"scan.stop", "3.2"}});
    CHECK(r.values.size() == 24);
  }
  SUBCASE("wavelength in micrometres") {
    ScanConfig s = scan_config_from_map({{"scan.variable", "lambda"}, {"scan.values", "1.6,3.2"}});
    s.resolve();
    CHECK(s.point(1.6).field.lambda_m == doctest::Approx(1.6e-6).epsilon(1e-15));
  }
  SUBCASE("invalid scans") {
    auto bad = [](const ConfigMap& m) {
      ScanConfig s = scan_config_from_map(m);
      s.resolve();
    };
    CHECK_THROWS_AS(bad({{"scan.values", "1,2"}}), ConfigError);
    CHECK_THROWS_AS(bad({{"scan.variable", "tau"}, {"scan.values", "1"}}), ConfigError);
    CHECK_THROWS_AS(bad({{"scan.variable", "lambda"}}), ConfigError);
    CHECK_THROWS_AS(bad({{"scan.variable", "lambda"}, {"scan.start", "2"}}), ConfigError);
    CHECK_THROWS_AS(bad({{"scan.variable", "delta_a"}, {"scan.values", "1,2"}, {"scan.count", "3"}}), ConfigError);
    CHECK_THROWS_AS(bad({{"scan.variable", "delta_a"}, {"scan.values", "1,1"}}), ConfigError);
    CHECK_THROWS_AS(bad({{"scan.variable", "delta_a"}, {"scan.values", "-1"}}), ConfigError);
    CHECK_THROWS_AS(bad({{"scan.variable", "km_ratio"}, {"scan.values", "0.5"}}), ConfigError);
    CHECK_THROWS_AS(bad({{"scan.variable", "lambda"}, {"scan.values", "1"}, {"scan.jobs", "0"}}), ConfigError);
    CHECK_THROWS_AS(bad({{"scan.variable", "delta_a"}, {"scan.count", "0"}}), ConfigError);
  }
  CHECK(to_string(parse_scan_variable("km_ratio")) == "km_ratio");
}

TEST_CASE("shortest round-trip number formatting") {
  for (double x : {0.1, 1.0 / 3.0, 2.81, 1e-300, -4.6487, 123456789.125, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.81) == "2.81");
}

TEST_CASE("shipped configurations are valid") {
  int runs = 0, scans = 0;
  for (const auto& entry : std::filesystem::directory_iterator(HHGND_CONFIG_DIR)) {
    const ConfigMap map = read_config_map(entry.path().string());
    if (map.count("scan.variable")) {
      CHECK_NOTHROW(load_scan_config(entry.path().string()));
      ++scans;
    } else {
      CHECK_NOTHROW(load_run_config(entry.path().string()));
      ++runs;
    }
  }
  CHECK(runs >= 3);
  CHECK(scans >= 3);
}
