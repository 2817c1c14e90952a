#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hhgnd {

using cd = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using CMatrix = Eigen::MatrixXcd;

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ModelKind { kGraphene, kHbn, kKaneMele };

ModelKind parse_model_kind(const std::string& name);
std::string to_string(ModelKind kind);

/// Default lattice constant (2.46 angstrom) in bohr.
inline constexpr double kDefaultLatticeConstant = 4.6487;

/// Physical parameters of a honeycomb tight-binding model. Energies in eV,
/// lengths in bohr. The B-site potential is always -delta_a.
struct ModelSpec {
  ModelKind kind = ModelKind::kGraphene;
  double t1 = 2.94;
  double delta_a = 0.0;
  double t2 = 0.0;
  double a = kDefaultLatticeConstant;
  int chirality = +1;

  /// Dimensionless Kane-Mele ratio delta_a / (3 sqrt(3) t2).
  double km_ratio() const;
};

/// One real-space matrix element <0 n|H|R m>. `r_cell` is the cell offset R
/// in lattice-vector coordinates, not the bond vector.
struct HoppingTerm {
  std::array<int, 2> r_cell{0, 0};
  int n = 0;
  int m = 0;
  cd amplitude{0.0, 0.0};
};

/// Tight-binding model in the Wannier gauge, H(k) = sum_R exp(ik.R) <0n|H|Rm>.
///
/// Orbitals are grouped into `blocks` with no matrix elements between blocks
/// (the two spin sectors of Kane-Mele; a single block otherwise).
struct LatticeModel {
  Vec2 a1 = Vec2::Zero();
  Vec2 a2 = Vec2::Zero();
  std::vector<Vec2> tau;
  std::vector<HoppingTerm> hoppings;
  std::vector<double> onsite;
  int n_orbitals = 0;
  std::vector<std::vector<int>> blocks;
  ModelSpec spec;
  /// Non-fatal remarks raised while building (e.g. Kane-Mele with t2 = 0).
  std::vector<std::string> warnings;

  /// Number of occupied bands at half filling.
  int n_occupied() const { return n_orbitals / 2; }
  /// Cartesian lattice vector for a cell offset.
  Vec2 cell_vector(const std::array<int, 2>& r) const { return r[0] * a1 + r[1] * a2; }
};

struct EigenSystem {
  Eigen::VectorXd energies;  // ascending, eV
  CMatrix unitary;           // columns are eigenvectors
};

struct BandSample {
  double arc_length = 0.0;  // bohr^-1
  std::vector<double> energies;
};

LatticeModel build_model(const ModelSpec& spec);

/// Reduced coordinates (u, v) of a Cartesian k: k = u b1 + v b2.
Vec2 to_reduced(const LatticeModel& model, const Vec2& k);
Vec2 to_cartesian(const LatticeModel& model, const Vec2& reduced);

/// Bloch Hamiltonian in eV at Cartesian k (bohr^-1).
CMatrix hamiltonian(const LatticeModel& model, const Vec2& k);

/// Analytic k-gradient (dH/dkx, dH/dky) in eV*bohr.
std::array<CMatrix, 2> grad_hamiltonian(const LatticeModel& model, const Vec2& k);

/// Diagonal Berry connection (xi_x, xi_y) in bohr. Only the on-site R = 0
/// position elements are kept, so the result is k-independent: diag(tau_n).
std::array<Eigen::MatrixXd, 2> berry_connection(const LatticeModel& model);

/// Block-resolved diagonalization with a deterministic phase convention: the
/// largest-magnitude component of each eigenvector is real and positive.
/// Degenerate energies are ordered by the orbital index of that component.
EigenSystem eigensystem(const LatticeModel& model, const Vec2& k);

/// Band energies along straight segments joining the reduced-coordinate
/// waypoints. `samples` points per segment; the final waypoint is included.
std::vector<BandSample> band_path(const LatticeModel& model, const std::vector<Vec2>& waypoints,
                                  int samples);

/// Minimum direct gap (eV) between the highest occupied and lowest empty band.
double min_direct_gap(const std::vector<BandSample>& path, int n_occupied);

}  // namespace hhgnd
