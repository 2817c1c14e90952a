#include "hhgnd/field.hpp"

#include <cmath>

#include "hhgnd/units.hpp"

namespace hhgnd {

using constants::kPi;
using constants::kSpeedOfLight;

void PulseParams::validate() const {
  if (!(e0_v_per_m > 0.0)) throw FieldError("field amplitude must be positive");
  if (!(lambda_m > 0.0)) throw FieldError("wavelength must be positive");
  if (n_cycles < 1) throw FieldError("pulse needs at least one cycle");
}

double PulseParams::omega() const {
  const double lambda_bohr = convert_units(lambda_m, "m", "bohr");
  return 2.0 * kPi * kSpeedOfLight / lambda_bohr;
}

double PulseParams::period() const { return 2.0 * kPi / omega(); }
double PulseParams::duration() const { return n_cycles * period(); }
double PulseParams::e0_au() const { return convert_units(e0_v_per_m, "v_per_m", "au_field"); }
double PulseParams::a0() const { return e0_au() / omega(); }

double envelope(double t, const PulseParams& params) {
  if (t <= 0.0 || t >= params.duration()) return 0.0;
  const double s = std::sin(params.omega() * t / (2.0 * params.n_cycles));
  return s * s;
}

VectorPotential vector_potential(double t, const PulseParams& params) {
  VectorPotential out;
  if (t <= 0.0 || t >= params.duration()) return out;
  const double w = params.omega();
  out.a_ed = params.a0() * envelope(t, params) * std::sin(w * t + params.cep);
  if (params.nd_enabled) out.a_t = -out.a_ed * out.a_ed / (2.0 * kSpeedOfLight);
  return out;
}

VectorPotential vector_potential_rate(double t, const PulseParams& params) {
  VectorPotential out;
  if (t <= 0.0 || t >= params.duration()) return out;
  const double w = params.omega();
  const double wn = w / (2.0 * params.n_cycles);
  const double s = std::sin(wn * t);
  const double env = s * s;
  const double env_rate = wn * std::sin(2.0 * wn * t);
  const double phase = w * t + params.cep;
  const double a_ed = params.a0() * env * std::sin(phase);
  out.a_ed = params.a0() * (env_rate * std::sin(phase) + env * w * std::cos(phase));
  if (params.nd_enabled) out.a_t = -a_ed * out.a_ed / kSpeedOfLight;
  return out;
}

FieldSample effective_field(double t, const PulseParams& params, const HsFrame& frame) {
  const VectorPotential a = vector_potential(t, params);
  const VectorPotential rate = vector_potential_rate(t, params);
  FieldSample sample;
  sample.a_2d = frame.embed(a.a_ed, a.a_t);
  sample.e_2d = -frame.embed(rate.a_ed, rate.a_t);
  return sample;
}

}  // namespace hhgnd
