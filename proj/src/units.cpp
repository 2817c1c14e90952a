#include "hhgnd/units.hpp"

#include <map>
#include <utility>

namespace hhgnd {

namespace {

enum class Dimension { kTime, kEnergy, kLength, kField };

struct UnitInfo {
  Dimension dim;
  double to_au;  // multiply a value in this unit by to_au to get atomic units
};

const std::map<std::string, UnitInfo>& unit_table() {
  using namespace constants;
  static const std::map<std::string, UnitInfo> table = {
      {"au_time", {Dimension::kTime, 1.0}},
      {"as", {Dimension::kTime, 1.0 / kTimeUnitAs}},
      {"fs", {Dimension::kTime, 1000.0 / kTimeUnitAs}},
      {"hartree", {Dimension::kEnergy, 1.0}},
      {"ev", {Dimension::kEnergy, 1.0 / kEnergyUnitEv}},
      {"bohr", {Dimension::kLength, 1.0}},
      {"angstrom", {Dimension::kLength, 1.0 / kLengthUnitAngstrom}},
      {"nm", {Dimension::kLength, 10.0 / kLengthUnitAngstrom}},
      {"um", {Dimension::kLength, 1.0e4 / kLengthUnitAngstrom}},
      {"m", {Dimension::kLength, 1.0e10 / kLengthUnitAngstrom}},
      {"au_field", {Dimension::kField, 1.0}},
      {"v_per_m", {Dimension::kField, 1.0 / kFieldUnitVPerM}},
      {"gv_per_m", {Dimension::kField, 1.0e9 / kFieldUnitVPerM}},
  };
  return table;
}

const UnitInfo& lookup(const std::string& name) {
  const auto& table = unit_table();
  auto it = table.find(name);
  if (it == table.end()) throw UnitError("unknown unit '" + name + "'");
  return it->second;
}

}  // namespace

double convert_units(double value, const std::string& from, const std::string& to) {
  const UnitInfo& src = lookup(from);
  const UnitInfo& dst = lookup(to);
  if (src.dim != dst.dim) {
    throw UnitError("cannot convert '" + from + "' to '" + to + "': different dimensions");
  }
  if (from == to) return value;
  return value * src.to_au / dst.to_au;
}

}  // namespace hhgnd
