#pragma once

#include <stdexcept>
#include <string>

namespace hhgnd {

/// Fixed conversion constants between SI-ish lab units and Hartree atomic units.
namespace constants {
inline constexpr double kSpeedOfLight = 137.035999;      // c in a.u.
inline constexpr double kFieldUnitVPerM = 5.14220675e11; // 1 a.u. electric field
inline constexpr double kTimeUnitAs = 24.18884;          // 1 a.u. time in attoseconds
inline constexpr double kEnergyUnitEv = 27.21138;        // 1 Hartree in eV
inline constexpr double kLengthUnitAngstrom = 0.529177;  // 1 bohr in angstrom
inline constexpr double kPi = 3.14159265358979323846;
}  // namespace constants

class UnitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Converts `value` between two named units of the same dimension.
///
/// Known units: time {au_time, as, fs}, energy {hartree, ev}, length
/// {bohr, angstrom, nm, um, m}, field {au_field, v_per_m, gv_per_m}.
/// Throws UnitError for unknown names or mismatched dimensions.
double convert_units(double value, const std::string& from, const std::string& to);

inline double ev_to_hartree(double ev) { return ev / constants::kEnergyUnitEv; }
inline double as_to_au(double as) { return as / constants::kTimeUnitAs; }
inline double fs_to_au(double fs) { return fs * 1000.0 / constants::kTimeUnitAs; }

}  // namespace hhgnd
