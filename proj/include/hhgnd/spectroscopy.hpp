#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hhgnd/sbe.hpp"

namespace hhgnd {

class SpectrumError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Window { kNone, kHann };

Window parse_window(const std::string& name);
std::string to_string(Window window);

/// One-sided spectrum of the two current components. Amplitudes follow
/// j(w) = dt * sum_n j(t_n) exp(+i w t_n); `omega` is in units of the driver.
struct Spectrum {
  std::vector<double> omega;
  std::vector<cd> j_m;
  std::vector<cd> j_k;
  std::vector<double> s_m;      // w^2 |j_M|^2, w in a.u.
  std::vector<double> s_k;      // w^2 |j_K|^2
  std::vector<double> s_total;  // s_m + s_k
  double omega0 = 0.0;          // driver angular frequency, a.u.
  double d_omega = 0.0;         // bin spacing, a.u.
};

/// Band-integrated intensities and Stokes parameters over [n - 1/2, n + 1/2] w0.
struct HarmonicBand {
  int n = 0;
  double lo = 0.0;
  double hi = 0.0;
  double power_m = 0.0;
  double power_k = 0.0;
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double helicity = 0.0;
  /// Set when s0 is below the 1e-300 floor; helicity is then reported as 0.
  bool empty = false;
};

/// DFT of a uniformly sampled trace. `pad_factor` >= 1 zero-pads the trace
/// to pad_factor times its length after windowing.
Spectrum fourier_spectrum(const CurrentTrace& trace, Window window, int pad_factor = 1);

/// Stokes parameters of the emitted field E(w) ~ i w j(w), integrated over
/// the band. S3 > 0 for counter-clockwise rotation of (E_M, E_K) in time.
HarmonicBand stokes_band(const Spectrum& spec, int n);

std::vector<HarmonicBand> helicity_table(const Spectrum& spec, int n_max);

}  // namespace hhgnd
