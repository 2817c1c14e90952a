#include "hhgnd/spectroscopy.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>

#include "hhgnd/units.hpp"

namespace hhgnd {

namespace {

constexpr double kStokesFloor = 1e-300;

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

// One-sided transform with the exp(+i w t) sign convention, scaled by dt.
std::vector<cd> forward(const std::vector<double>& samples, double dt) {
  const int n = static_cast<int>(samples.size());
  std::unique_ptr<double, FftwDeleter> in(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwDeleter> out(fftw_alloc_complex(n / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE);
  std::copy(samples.begin(), samples.end(), in.get());
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  std::vector<cd> result(n / 2 + 1);
  for (int i = 0; i <= n / 2; ++i) result[i] = dt * cd(out.get()[i][0], -out.get()[i][1]);
  return result;
}

}  // namespace

Window parse_window(const std::string& name) {
  if (name == "hann") return Window::kHann;
  if (name == "none") return Window::kNone;
  throw SpectrumError("unknown window '" + name + "'");
}

std::string to_string(Window window) { return window == Window::kHann ? "hann" : "none"; }

Spectrum fourier_spectrum(const CurrentTrace& trace, Window window, int pad_factor) {
  const std::size_t n = trace.t.size();
  if (n < 2 || trace.j.size() != n) throw SpectrumError("trace needs at least two samples");
  if (pad_factor < 1) throw SpectrumError("pad factor must be >= 1");
  if (!(trace.omega0 > 0.0)) throw SpectrumError("trace has no driver frequency");
  const double dt = (trace.t.back() - trace.t.front()) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) throw SpectrumError("time grid must be increasing");
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = trace.t.front() + static_cast<double>(i) * dt;
    if (std::abs(trace.t[i] - expected) > 1e-9 * dt) throw SpectrumError("time grid is not uniform");
  }

  const std::size_t total = n * static_cast<std::size_t>(pad_factor);
  std::vector<double> jm(total, 0.0);
  std::vector<double> jk(total, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window == Window::kHann) {
      const double s = std::sin(constants::kPi * static_cast<double>(i) / static_cast<double>(n - 1));
      w = s * s;
    }
    jm[i] = w * trace.j[i].x();
    jk[i] = w * trace.j[i].y();
  }

  Spectrum spec;
  spec.omega0 = trace.omega0;
  spec.d_omega = 2.0 * constants::kPi / (static_cast<double>(total) * dt);
  spec.j_m = forward(jm, dt);
  spec.j_k = forward(jk, dt);
  // Phases refer to the trace's own origin t_0.
  if (trace.t.front() != 0.0) {
    for (std::size_t i = 0; i < spec.j_m.size(); ++i) {
      const cd shift = std::polar(1.0, static_cast<double>(i) * spec.d_omega * trace.t.front());
      spec.j_m[i] *= shift;
      spec.j_k[i] *= shift;
    }
  }
  const std::size_t bins = spec.j_m.size();
  spec.omega.resize(bins);
  spec.s_m.resize(bins);
  spec.s_k.resize(bins);
  spec.s_total.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const double w = static_cast<double>(i) * spec.d_omega;
    spec.omega[i] = w / trace.omega0;
    spec.s_m[i] = w * w * std::norm(spec.j_m[i]);
    spec.s_k[i] = w * w * std::norm(spec.j_k[i]);
    spec.s_total[i] = spec.s_m[i] + spec.s_k[i];
  }
  return spec;
}

HarmonicBand stokes_band(const Spectrum& spec, int n) {
  if (n < 1) throw SpectrumError("harmonic order must be >= 1");
  HarmonicBand band;
  band.n = n;
  band.lo = n - 0.5;
  band.hi = n + 0.5;
  if (spec.omega.empty() || spec.omega.back() < band.hi) {
    throw SpectrumError("harmonic " + std::to_string(n) + " lies beyond the resolved frequency range");
  }
  for (std::size_t i = 0; i < spec.omega.size(); ++i) {
    if (spec.omega[i] < band.lo || spec.omega[i] >= band.hi) continue;
    const double w = spec.omega[i] * spec.omega0;
    const cd e1 = cd(0.0, w) * spec.j_m[i];
    const cd e2 = cd(0.0, w) * spec.j_k[i];
    const cd cross = std::conj(e1) * e2;
    band.power_m += std::norm(e1) * spec.d_omega;
    band.power_k += std::norm(e2) * spec.d_omega;
    band.s2 += 2.0 * cross.real() * spec.d_omega;
    band.s3 += 2.0 * cross.imag() * spec.d_omega;
  }
  band.s0 = band.power_m + band.power_k;
  band.s1 = band.power_m - band.power_k;
  if (band.s0 < kStokesFloor) {
    band.empty = true;
    band.helicity = 0.0;
  } else {
    band.helicity = band.s3 / band.s0;
  }
  return band;
}

std::vector<HarmonicBand> helicity_table(const Spectrum& spec, int n_max) {
  std::vector<HarmonicBand> out;
  out.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) out.push_back(stokes_band(spec, n));
  return out;
}

}  // namespace hhgnd
