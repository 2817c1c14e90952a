#include "hhgnd/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hhgnd/units.hpp"

namespace hhgnd {

std::string format_double(double value) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
}

std::string current_csv(const CurrentTrace& trace) {
  std::ostringstream out;
  out << "t_au,t_fs,j_M_au,j_K_au\n";
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    out << format_double(trace.t[i]) << ',' << format_double(convert_units(trace.t[i], "au_time", "fs")) << ','
        << format_double(trace.j[i].x()) << ',' << format_double(trace.j[i].y()) << '\n';
  }
  return out.str();
}

std::string spectrum_csv(const Spectrum& spec) {
  std::ostringstream out;
  out << "omega_over_w0,s_total,s_M,s_K,re_jM,im_jM,re_jK,im_jK\n";
  for (std::size_t i = 0; i < spec.omega.size(); ++i) {
    out << format_double(spec.omega[i]) << ',' << format_double(spec.s_total[i]) << ','
        << format_double(spec.s_m[i]) << ',' << format_double(spec.s_k[i]) << ','
        << format_double(spec.j_m[i].real()) << ',' << format_double(spec.j_m[i].imag()) << ','
        << format_double(spec.j_k[i].real()) << ',' << format_double(spec.j_k[i].imag()) << '\n';
  }
  return out.str();
}

std::string helicity_csv(const std::vector<HarmonicBand>& bands) {
  std::ostringstream out;
  out << "n,power_M,power_K,s0,s1,s2,s3,helicity\n";
  for (const auto& b : bands) {
    out << b.n << ',' << format_double(b.power_m) << ',' << format_double(b.power_k) << ','
        << format_double(b.s0) << ',' << format_double(b.s1) << ',' << format_double(b.s2) << ','
        << format_double(b.s3) << ',' << format_double(b.helicity) << '\n';
  }
  return out.str();
}

std::string bands_csv(const std::vector<BandSample>& path) {
  std::ostringstream out;
  out << "arc_length_bohr_inv";
  const std::size_t n = path.empty() ? 0 : path.front().energies.size();
  for (std::size_t i = 1; i <= n; ++i) out << ",e" << i << "_eV";
  out << '\n';
  for (const auto& s : path) {
    out << format_double(s.arc_length);
    for (double e : s.energies) out << ',' << format_double(e);
    out << '\n';
  }
  return out.str();
}

}  // namespace hhgnd
