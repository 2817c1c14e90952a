#pragma once

#include <stdexcept>

#include "hhgnd/bz_grid.hpp"

namespace hhgnd {

class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linearly polarized sin^2-envelope pulse. Lab units at the interface,
/// atomic units from the accessors.
struct PulseParams {
  double e0_v_per_m = 4.0e9;
  double lambda_m = 3.2e-6;
  int n_cycles = 20;
  bool nd_enabled = true;
  double cep = 0.0;

  void validate() const;
  double omega() const;       // carrier angular frequency, a.u.
  double period() const;      // a.u.
  double duration() const;    // n_cycles * period, a.u.
  double e0_au() const;
  double a0() const;          // e0 / omega, a.u.
};

struct VectorPotential {
  double a_ed = 0.0;  // dipole term along the polarization axis
  double a_t = 0.0;   // nondipole term along the propagation axis
};

/// In-plane field at one instant. Cartesian vectors in the lattice frame,
/// atomic units; e_2d = -d(a_2d)/dt.
struct FieldSample {
  Vec2 a_2d = Vec2::Zero();
  Vec2 e_2d = Vec2::Zero();
};

double envelope(double t, const PulseParams& params);
VectorPotential vector_potential(double t, const PulseParams& params);
/// Time derivative of vector_potential().
VectorPotential vector_potential_rate(double t, const PulseParams& params);

/// Grazing incidence: polarization along e_m, propagation along e_k.
FieldSample effective_field(double t, const PulseParams& params, const HsFrame& frame);

}  // namespace hhgnd
