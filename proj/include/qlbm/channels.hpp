#pragma once

#include <array>

#include "qlbm/lattice.hpp"

namespace qlbm {

/// D2Q9 velocity set: one rest channel, four axis channels, four diagonals.
///
/// Index order: 0 = rest; 1-4 = (1,0),(0,1),(-1,0),(0,-1); 5-8 =
/// (1,1),(-1,1),(-1,-1),(1,-1). Weights 4/9, 1/9 (axis), 1/36 (diagonal);
/// lattice sound speed cs^2 = 1/3.
struct ChannelSet {
  static constexpr int kCount = 9;
  static constexpr double kCs2 = 1.0 / 3.0;

  std::array<Vec2i, kCount> velocity;
  std::array<double, kCount> weight;

  int count() const { return kCount; }
  double cs2() const { return kCs2; }

  /// Channel carrying the reversed velocity -c_i.
  int opposite(int i) const;

  /// Euclidean dot product c_i . c_j.
  double dot(int i, int j) const {
    return static_cast<double>(velocity[i].x * velocity[j].x +
                               velocity[i].y * velocity[j].y);
  }
};

/// The canonical D2Q9 table (shared immutable instance).
const ChannelSet& d2q9();

}  // namespace qlbm
