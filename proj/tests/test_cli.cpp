#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome cli(const std::string& args) {
  const std::string command = std::string(HHGND_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Outcome o;
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) o.out += buf.data();
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

fs::path workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "hhgnd_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_config(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kSmall =
    "[model]\nkind = hbn\n[grid]\nn = 6\n[field]\ncycles = 1\n[prop]\ndt_as = 20\n[spec]\nnmax = 5\n";

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST_CASE("run writes the artifact set") {
  const std::string cfg = write_config("small.ini", kSmall);
  const fs::path out = workdir() / "run1";
  const Outcome o = cli("run --config " + cfg + " --output-dir " + out.string());
  REQUIRE(o.code == 0);
  for (const char* f : {"current.csv", "spectrum.csv", "helicity.csv", "grid.csv", "manifest.json"}) {
    CHECK(fs::exists(out / f));
  }
  CHECK(first_line(slurp(out / "current.csv")) == "t_au,t_fs,j_M_au,j_K_au");
  CHECK(first_line(slurp(out / "spectrum.csv")) == "omega_over_w0,s_total,s_M,s_K,re_jM,im_jM,re_jK,im_jK");
  CHECK(first_line(slurp(out / "helicity.csv")) == "n,power_M,power_K,s0,s1,s2,s3,helicity");
  CHECK(first_line(slurp(out / "grid.csv")) == "kx_bohr_inv,ky_bohr_inv");

  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["software"] == "hhgnd");
  CHECK(manifest["config"]["model.kind"] == "hbn");
  CHECK(manifest["config"]["grid.n"] == "6");
  CHECK(manifest["config"]["prop.tau_fs"] == "2");
  CHECK(manifest["steps"].get<long>() + 1 == manifest["samples"].get<long>());
  CHECK(manifest["diagnostics"]["max_hermiticity_deviation"].get<double>() <= 1e-10);

  std::istringstream helicity(slurp(out / "helicity.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(helicity, line)) ++rows;
  CHECK(rows == 5);
  for (const fs::directory_entry& e : fs::directory_iterator(out)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("outputs are byte-identical across worker counts and manifest reruns") {
  const std::string cfg = write_config("small.ini", kSmall);
  const fs::path a = workdir() / "w1";
  const fs::path b = workdir() / "w3";
  const fs::path c = workdir() / "rerun";
  REQUIRE(cli("run --config " + cfg + " --workers 1 --output-dir " + a.string()).code == 0);
  REQUIRE(cli("run --config " + cfg + " --workers 3 --output-dir " + b.string()).code == 0);
  REQUIRE(cli("run --config " + (a / "manifest.json").string() + " --output-dir " + c.string()).code == 0);
  for (const char* f : {"current.csv", "spectrum.csv", "helicity.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(c / f));
  }
}

TEST_CASE("overrides reach the configuration") {
  const std::string cfg = write_config("small.ini", kSmall);
  const fs::path out = workdir() / "override";
  REQUIRE(cli("run --config " + cfg + " --nd off --grid 4 --cycles 2 --output-dir " + out.string()).code == 0);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["config"]["field.nd"] == "false");
  CHECK(manifest["config"]["grid.n"] == "4");
  CHECK(manifest["config"]["field.cycles"] == "2");
}

TEST_CASE("configuration errors exit with status 2") {
  CHECK(cli("run --config " + write_config("extra.ini", kSmall + "[extra]\nfoo = 1\n")).code == 2);
  CHECK(cli("run --config " + write_config("tau.ini", "[prop]\ntau_fs = 0\n")).code == 2);
  CHECK(cli("run --config " + write_config("typo.ini", "[prop]\ntua_fs = 2\n")).code == 2);
  CHECK(cli("run --config /nonexistent.ini").code == 2);
  CHECK(cli("run --config " + write_config("ok.ini", kSmall) + " --frobnicate").code == 2);
  CHECK(cli("run --config " + write_config("ok.ini", kSmall) + " --nd maybe").code == 2);
  CHECK(cli("run").code == 2);
  CHECK(cli("").code == 2);
}

TEST_CASE("numerical instability exits with status 3") {
  const std::string cfg = write_config("unstable.ini", "[model]\nkind = hbn\n[grid]\nn = 4\n[field]\ncycles = 5\n[prop]\ndt_as = 2000\n");
  CHECK(cli("run --config " + cfg + " --output-dir " + (workdir() / "unstable").string()).code == 3);
}

TEST_CASE("bands subcommand") {
  const std::string cfg = write_config("hbn.ini", "[model]\nkind = hbn\n");
  const fs::path out = workdir() / "bands";
  const Outcome o = cli("bands --config " + cfg + " --output-dir " + out.string());
  REQUIRE(o.code == 0);
  const auto pos = o.out.find("min_direct_gap_eV ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(o.out.substr(pos + 18)) == doctest::Approx(5.62).epsilon(1e-9));
  CHECK(first_line(slurp(out / "bands.csv")) == "arc_length_bohr_inv,e1_eV,e2_eV");

  const Outcome g = cli("bands --config " + write_config("g.ini", "[model]\nkind = graphene\n") + " --output-dir " +
                        out.string());
  CHECK(std::abs(std::stod(g.out.substr(g.out.find(' ') + 1))) <= 1e-12);
}

TEST_CASE("chern subcommand") {
  const Outcome topo = cli("chern --config " + write_config("km.ini", "[model]\nkind = kane_mele\nkm_ratio = 0.5\n"));
  REQUIRE(topo.code == 0);
  const bool pm = topo.out.find("chern spin_up=+1 spin_down=-1") != std::string::npos;
  const bool mp = topo.out.find("chern spin_up=-1 spin_down=+1") != std::string::npos;
  CHECK((pm || mp));
  const Outcome trivial = cli("chern --config " + write_config("km2.ini", "[model]\nkind = kane_mele\nkm_ratio = 2\n"));
  CHECK(trivial.out.find("chern spin_up=+0 spin_down=+0") != std::string::npos);
  const Outcome closed = cli("chern --config " + write_config("km1.ini", "[model]\nkind = kane_mele\nkm_ratio = 1\n"));
  CHECK(closed.code == 0);
  CHECK(closed.out.find("gap_closed") != std::string::npos);
}

TEST_CASE("field-dump subcommand") {
  const std::string cfg = write_config("dump.ini", "[field]\ncycles = 2\nnd = off\n[prop]\ndt_as = 10\n");
  const fs::path out = workdir() / "dump";
  REQUIRE(cli("field-dump --config " + cfg + " --output-dir " + out.string()).code == 0);
  std::istringstream in(slurp(out / "field.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "t_au,t_fs,A_M_au,A_K_au,E_M_au,E_K_au");
  int rows = 0;
  // 3.2 um driver: omega = 2 pi c / lambda, A0 = E0 / omega.
  const double w = 2.0 * 3.14159265358979323846 * 137.035999 / (3.2e-6 / 0.529177e-10);
  const double a0 = 4e9 / 5.14220675e11 / w;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 6);
    CHECK(v[3] == 0.0);
    CHECK(v[5] == 0.0);
    const double s = std::sin(w * v[0] / 4.0);
    CHECK(v[2] == doctest::Approx(a0 * s * s * std::sin(w * v[0])).epsilon(1e-6).scale(a0));
    ++rows;
  }
  CHECK(rows > 100);
}

TEST_CASE("scan subcommand") {
  const std::string cfg = write_config(
      "scan.ini", "[model]\nkind = kane_mele\n[grid]\nn = 4\n[field]\ncycles = 1\n[prop]\ndt_as = 20\n[spec]\nnmax = 3\n"
                  "[scan]\nvariable = km_ratio\nvalues = 0.5, 2.0\n");
  const fs::path out = workdir() / "scan";
  const Outcome o = cli("scan --jobs 2 --config " + cfg + " --output-dir " + out.string());
  REQUIRE(o.code == 0);
  CHECK(fs::exists(out / "point_000" / "current.csv"));
  CHECK(fs::exists(out / "point_001" / "manifest.json"));
  std::istringstream in(slurp(out / "helicity_map.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "value,n,helicity,power_M,power_K,chern_up,chern_down");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 6);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["points"].size() == 2);
  CHECK(manifest["points"][1]["chern"]["spin_up"] == 0);

  // A failing point is reported but does not stop the others.
  const std::string bad = write_config(
      "scan_bad.ini", "[grid]\nn = 9\n[field]\ncycles = 1\n[prop]\ndt_as = 20\n[spec]\nnmax = 3\n"
                      "[scan]\nvariable = delta_a\nvalues = 0, 1\n");
  const fs::path out2 = workdir() / "scan_bad";
  CHECK(cli("scan --config " + bad + " --output-dir " + out2.string()).code == 3);
  const auto m2 = nlohmann::json::parse(slurp(out2 / "manifest.json"));
  CHECK(m2["points"][0]["ok"] == false);
  CHECK(m2["points"][1]["ok"] == true);
}
