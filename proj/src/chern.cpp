#include "hhgnd/chern.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "hhgnd/units.hpp"

namespace hhgnd {

namespace {

constexpr double kMinGapEv = 1e-6;

// Link variable <u(k)|u(k')> normalized to unit modulus.
cd link(const Eigen::VectorXcd& from, const Eigen::VectorXcd& to) {
  const cd overlap = from.dot(to);
  return overlap / std::abs(overlap);
}

}  // namespace

int chern_number(const LatticeModel& model, int spin_block, int grid_n) {
  if (spin_block < 0 || spin_block >= static_cast<int>(model.blocks.size())) {
    throw ModelError("block index " + std::to_string(spin_block) + " out of range");
  }
  if (grid_n < 2) throw ModelError("chern grid needs at least 2 points per axis");

  const auto& block = model.blocks[spin_block];
  const int m = static_cast<int>(block.size());
  const int n = grid_n;
  std::vector<Eigen::VectorXcd> lower(static_cast<std::size_t>(n) * n);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 k = to_cartesian(model, Vec2(double(i) / n, double(j) / n));
      const CMatrix h = hamiltonian(model, k);
      CMatrix sub(m, m);
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) sub(p, q) = h(block[p], block[q]);
      Eigen::SelfAdjointEigenSolver<CMatrix> solver(sub);
      const double gap = solver.eigenvalues()(1) - solver.eigenvalues()(0);
      if (gap <= kMinGapEv) {
        throw GapClosureError("gap " + std::to_string(gap) + " eV at mesh point (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
      }
      lower[static_cast<std::size_t>(i) * n + j] = solver.eigenvectors().col(0);
    }
  }

  auto at = [&](int i, int j) -> const Eigen::VectorXcd& {
    return lower[static_cast<std::size_t>((i + n) % n) * n + (j + n) % n];
  };
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cd plaquette = link(at(i, j), at(i + 1, j)) * link(at(i + 1, j), at(i + 1, j + 1)) *
                           link(at(i + 1, j + 1), at(i, j + 1)) * link(at(i, j + 1), at(i, j));
      total += std::arg(plaquette);
    }
  }
  const double c = total / (2.0 * constants::kPi);
  const double rounded = std::round(c);
  if (std::abs(c - rounded) > 1e-6) {
    throw GapClosureError("non-integer lattice Chern sum " + std::to_string(c));
  }
  return static_cast<int>(rounded);
}

}  // namespace hhgnd
