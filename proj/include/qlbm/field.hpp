#pragma once

#include <vector>

#include "qlbm/channels.hpp"
#include "qlbm/lattice.hpp"

namespace qlbm {

/// Per-site, per-channel distribution values, stored site-major
/// (values[site*9 + channel]) with a time-step counter.
struct DistributionField {
  LatticeGrid grid;
  int time = 0;
  std::vector<double> values;

  explicit DistributionField(const LatticeGrid& g)
      : grid(g), values(static_cast<std::size_t>(g.sites()) * ChannelSet::kCount, 0.0) {}

  double& at(int site, int i) { return values[static_cast<std::size_t>(site) * 9 + i]; }
  double at(int site, int i) const { return values[static_cast<std::size_t>(site) * 9 + i]; }
  double& at(int x, int y, int i) { return at(grid.index(x, y), i); }
  double at(int x, int y, int i) const { return at(grid.index(x, y), i); }

  /// Total mass over all sites and channels.
  double total_mass() const;
};

/// Per-site density and velocity.
struct Macroscopics {
  std::vector<double> rho;
  std::vector<Vec2d> u;
};

}  // namespace qlbm
