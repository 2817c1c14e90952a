#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hhgnd/bz_grid.hpp"
#include "hhgnd/field.hpp"
#include "hhgnd/lattice.hpp"

namespace hhgnd {

/// Raised when propagation becomes unstable (density loses Hermiticity).
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PropagationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class DephasingBasis { kEigen, kWannier };

DephasingBasis parse_dephasing_basis(const std::string& name);
std::string to_string(DephasingBasis basis);

struct PropagationParams {
  double dt_as = 2.5;
  double tau_fs = 2.0;
  DephasingBasis dephasing_basis = DephasingBasis::kEigen;
  int output_stride = 1;
  int workers = 0;  // 0 = all available threads

  void validate() const;
  double dt_au() const;
  double tau_au() const;
};

/// Reduced density matrix rho_nm(k) = <a^dag_m a_n> for every grid point.
struct DensityGrid {
  int n_orbitals = 0;
  std::vector<CMatrix> rho;
};

/// Brillouin-zone averaged current. `j` holds (j_M, j_K) components in the
/// high-symmetry frame, atomic units. `omega0` is the driver frequency.
struct CurrentTrace {
  std::vector<double> t;
  std::vector<Vec2> j;
  double omega0 = 0.0;
};

struct PropagationDiagnostics {
  long steps = 0;
  int workers = 1;
  double max_hermiticity_deviation = 0.0;
  double max_trace_drift = 0.0;
  double max_current_imag = 0.0;
};

struct PropagationResult {
  CurrentTrace trace;
  PropagationDiagnostics diagnostics;
};

/// Ground-state projector onto the lowest n_occupied bands at every grid point,
/// expressed in the Wannier orbital basis.
DensityGrid initial_density(const LatticeModel& model, const MPGrid& grid);

/// Moving-frame crystal momentum k0 + A(t) (Cartesian, bohr^-1).
Vec2 shifted_k(const Vec2& k0, double t, const PulseParams& pulse, const HsFrame& frame);

/// d(rho)/dt in atomic units for the moving-frame point k0 at time t:
/// -i [H0(k_t) + E(t).xi, rho] - offdiag(rho) / tau.
CMatrix rhs(const CMatrix& rho_k, const Vec2& k0, double t, const LatticeModel& model,
            const PulseParams& pulse, const HsFrame& frame, const PropagationParams& params);

/// Off-diagonal part of rho in the configured dephasing basis, where the eigen
/// basis is that of H0 at Cartesian k.
CMatrix dephasing_offdiagonal(const CMatrix& rho_k, const LatticeModel& model, const Vec2& k,
                              DephasingBasis basis);

/// Re Tr[rho (dH0/dk - i[xi, H0])] at Cartesian k, atomic units.
Vec2 current_density(const LatticeModel& model, const CMatrix& rho_k, const Vec2& k);

/// Classic RK4 per k-point in the moving frame. The BZ-averaged current is
/// reduced in a fixed order, so results do not depend on the worker count.
/// Throws NumericalAbort if the Hermiticity deviation exceeds 1e-6.
PropagationResult propagate(const LatticeModel& model, const MPGrid& grid, const PulseParams& pulse,
                            const HsFrame& frame, const PropagationParams& params);

/// Number of RK4 steps covering the pulse: ceil(duration / dt).
long step_count(const PulseParams& pulse, const PropagationParams& params);

}  // namespace hhgnd
