#pragma once

#include <iosfwd>
#include <string>

#include "qlbm/field.hpp"

namespace qlbm {

/// Writes a distribution field as CSV with header "x,y,i,f", one row per
/// (site, channel) in x-major, then y, then channel order. Values use 17
/// significant digits so a round trip is bit-exact.
void write_field_csv(std::ostream& os, const DistributionField& f);
void write_field_csv(const std::string& path, const DistributionField& f);

/// Reads a field written by write_field_csv. The grid shape is inferred from
/// the maximum coordinates; every (x, y, i) cell must appear exactly once.
/// Throws std::runtime_error on malformed input.
DistributionField read_field_csv(std::istream& is);
DistributionField read_field_csv(const std::string& path);

}  // namespace qlbm
