#include "qlbm/lattice.hpp"

namespace qlbm {
namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(int n) {
  int b = 0;
  while ((1 << b) < n) ++b;
  return b;
}

}  // namespace

LatticeGrid::LatticeGrid(int lx, int ly) : lx_(lx), ly_(ly) {
  if (!is_power_of_two(lx) || !is_power_of_two(ly)) {
    throw std::invalid_argument("LatticeGrid: extents must be powers of two, got " +
                                std::to_string(lx) + "x" + std::to_string(ly));
  }
  x_bits_ = log2_exact(lx);
  y_bits_ = log2_exact(ly);
}

}  // namespace qlbm
