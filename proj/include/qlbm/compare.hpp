#pragma once

#include <array>
#include <vector>

#include "qlbm/field.hpp"

namespace qlbm {

/// Error statistics between a trial vector and a reference vector.
/// Entries whose reference magnitude exceeds `floor` contribute a relative
/// error |a - b| / |b|; entries at or below the floor are never divided and
/// contribute only to the absolute channel.
struct ErrorStats {
  double max_abs = 0.0;              ///< L-inf of |a - b| over all entries.
  double max_rel = 0.0;              ///< max |a - b| / |b| over above-floor entries.
  double rel_l2 = 0.0;               ///< ||a - b||_2 / ||b||_2 (0 when b == 0).
  double max_abs_below_floor = 0.0;  ///< L-inf of |a - b| over below-floor entries.
  int relative_entries = 0;          ///< count of above-floor entries.
  int absolute_entries = 0;          ///< count of below-floor entries.
};

/// Default reference-magnitude floor below which division is skipped.
inline constexpr double kDefaultRelFloor = 1e-12;

/// Elementwise statistics of `a` against reference `b` (equal lengths required).
ErrorStats compare_values(const std::vector<double>& a,
                          const std::vector<double>& b,
                          double floor = kDefaultRelFloor);

/// Full report of `a` against reference `b`: overall stats, stats per channel,
/// and the per-site maximum relative error.
struct FieldComparison {
  ErrorStats overall;
  std::array<ErrorStats, 9> per_channel;
  std::vector<double> site_max_rel;  ///< indexed by site; 0 if all below floor.
};

/// Compares two distribution fields on the same grid.
/// Throws std::invalid_argument on shape mismatch.
FieldComparison compare_fields(const DistributionField& a,
                               const DistributionField& b,
                               double floor = kDefaultRelFloor);

/// ||a - b||_2 / ||b||_2 over flat vectors (equal lengths required; 0 when
/// the reference norm is 0).
double relative_l2(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace qlbm
