#pragma once

#include <stdexcept>

#include "hhgnd/lattice.hpp"

namespace hhgnd {

/// Raised when a band gap closes (or nearly closes) on the sampling grid.
class GapClosureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chern number of the lowest band of one orbital block, from lattice
/// field strengths on a grid_n x grid_n periodic mesh (Fukui-Hatsugai-Suzuki).
///
/// Throws GapClosureError when the block gap at any mesh point is <= 1e-6 eV,
/// and ModelError for an invalid block index or grid_n < 2.
int chern_number(const LatticeModel& model, int spin_block, int grid_n);

}  // namespace hhgnd
