#pragma once

#include <stdexcept>
#include <vector>

#include "hhgnd/lattice.hpp"

namespace hhgnd {

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ReciprocalBasis {
  Vec2 b1 = Vec2::Zero();
  Vec2 b2 = Vec2::Zero();

  Vec2 to_cartesian(const Vec2& reduced) const { return reduced.x() * b1 + reduced.y() * b2; }
};

/// Shifted Monkhorst-Pack mesh in reduced coordinates, u_i = (2i - n - 1) / (2n).
/// Point p = i * n + j has coordinates (u_i, u_j).
struct MPGrid {
  int n1 = 0;
  int n2 = 0;
  std::vector<Vec2> points;
  double weight = 0.0;

  std::size_t size() const { return points.size(); }
  /// True when a Dirac corner K or K' is a mesh point (n = 3 mod 6).
  bool contains_k_point() const;
};

/// Unit vectors of the high-symmetry frame: e_m along Gamma-M, e_k along
/// Gamma-K, with e_k = e_m rotated by +90 degrees.
struct HsFrame {
  Vec2 e_k = Vec2::Zero();
  Vec2 e_m = Vec2::Zero();
  /// Reduced coordinates of the Brillouin-zone corner along e_k.
  Vec2 k_corner_reduced = Vec2::Zero();
  /// Reduced coordinates of the zone-edge midpoint along e_m.
  Vec2 m_point_reduced = Vec2::Zero();

  /// Projection onto (e_m, e_k) components.
  Vec2 project(const Vec2& v) const { return Vec2(v.dot(e_m), v.dot(e_k)); }
  Vec2 embed(double m, double k) const { return m * e_m + k * e_k; }
};

ReciprocalBasis reciprocal_basis(const Vec2& a1, const Vec2& a2);
MPGrid monkhorst_pack(int n);

/// High-symmetry frame of a hexagonal basis (|b1| = |b2|, 120 degrees apart).
///
/// e_m points at the M point (b1 + b2)/2, the zone-edge midpoint on the
/// sublattice-preserving mirror line that swaps b1 and b2. The mirror
/// k_K -> -k_K is then (u, v) -> (v, u), an exact symmetry of every MP grid.
/// e_k points at the corner (b2 - b1)/3, 90 degrees from that M.
HsFrame hs_frame(const ReciprocalBasis& basis);

}  // namespace hhgnd
