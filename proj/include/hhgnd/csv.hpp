#pragma once

#include <string>
#include <vector>

#include "hhgnd/lattice.hpp"
#include "hhgnd/sbe.hpp"
#include "hhgnd/spectroscopy.hpp"

namespace hhgnd {

/// Shortest text that round-trips; at most 17 significant digits.
std::string format_double(double value);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

std::string current_csv(const CurrentTrace& trace);
std::string spectrum_csv(const Spectrum& spec);
std::string helicity_csv(const std::vector<HarmonicBand>& bands);
std::string bands_csv(const std::vector<BandSample>& path);

}  // namespace hhgnd
