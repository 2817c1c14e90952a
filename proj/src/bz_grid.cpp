#include "hhgnd/bz_grid.hpp"

#include <cmath>

#include "hhgnd/units.hpp"

namespace hhgnd {

ReciprocalBasis reciprocal_basis(const Vec2& a1, const Vec2& a2) {
  const double det = a1.x() * a2.y() - a1.y() * a2.x();
  if (std::abs(det) <= 1e-12 * a1.norm() * a2.norm()) {
    throw GridError("lattice vectors are collinear");
  }
  const double scale = 2.0 * constants::kPi / det;
  ReciprocalBasis basis;
  basis.b1 = scale * Vec2(a2.y(), -a2.x());
  basis.b2 = scale * Vec2(-a1.y(), a1.x());
  return basis;
}

bool MPGrid::contains_k_point() const {
  // u = +-1/3 (mod 1) requires 3 (2i - n - 1) = +-2n (mod 6n); same for v.
  auto hits_third = [](int n, int sign) {
    for (int i = 1; i <= n; ++i) {
      const long num = 3L * (2L * i - n - 1) - sign * 2L * n;
      if (num % (6L * n) == 0) return true;
    }
    return false;
  };
  // Corners sit at (1/3, -1/3) and (-1/3, 1/3) modulo 1.
  return (hits_third(n1, +1) && hits_third(n2, -1)) || (hits_third(n1, -1) && hits_third(n2, +1));
}

MPGrid monkhorst_pack(int n) {
  if (n < 2) throw GridError("Monkhorst-Pack grid needs n >= 2");
  MPGrid grid;
  grid.n1 = n;
  grid.n2 = n;
  grid.weight = 1.0 / (static_cast<double>(n) * n);
  std::vector<double> coord(n);
  for (int i = 1; i <= n; ++i) coord[i - 1] = static_cast<double>(2 * i - n - 1) / (2.0 * n);
  grid.points.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) grid.points.emplace_back(coord[i], coord[j]);
  return grid;
}

HsFrame hs_frame(const ReciprocalBasis& basis) {
  const double n1 = basis.b1.norm();
  const double n2 = basis.b2.norm();
  const double cosine = basis.b1.dot(basis.b2) / (n1 * n2);
  if (std::abs(n1 - n2) > 1e-10 * n1 || std::abs(cosine + 0.5) > 1e-10) {
    throw GridError("hs_frame requires a hexagonal lattice (a1, a2 at 60 degrees, equal length)");
  }
  HsFrame frame;
  frame.m_point_reduced = Vec2(0.5, 0.5);
  frame.k_corner_reduced = Vec2(-1.0 / 3.0, 1.0 / 3.0);
  frame.e_m = basis.to_cartesian(frame.m_point_reduced).normalized();
  frame.e_k = Vec2(-frame.e_m.y(), frame.e_m.x());
  return frame;
}

}  // namespace hhgnd
