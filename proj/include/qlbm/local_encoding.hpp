#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qlbm/carleman.hpp"
#include "qlbm/lattice.hpp"

namespace qlbm {

/// Relative-coordinate machinery for the pair field g(x1, x2).
///
/// The encoded layout stores g at (x1, r) where r packs the per-dimension
/// offsets rx = (x2x - x1x) mod Lx, ry = (x2y - x1y) mod Ly with the same
/// row-major convention as absolute sites. Diagonal entries g(x, x) then live
/// at r = 0 for every x, which lets one site-independent operator act on all
/// diagonals at once.

/// Packed relative index of x2 as seen from x1.
int relative_site(const LatticeGrid& grid, int x1, int x2);

/// Inverse: the absolute site x2 = x1 + rel (per-dimension modular).
int absolute_site(const LatticeGrid& grid, int x1, int rel);

/// Natural pair array g[((x1*N + x2)*9 + i)*9 + j] -> encoded
/// array g[((x1*N + rel)*9 + i)*9 + j].
std::vector<double> encode_pair_field(const LatticeGrid& grid,
                                      const std::vector<double>& g_natural);

/// Inverse of encode_pair_field.
std::vector<double> decode_pair_field(const LatticeGrid& grid,
                                      const std::vector<double>& g_encoded);

/// Streaming displacements for one channel pair in encoded coordinates:
/// the base coordinate moves by c_i while the relative coordinate moves by
/// c_j - c_i, so that (x1 + c_i) + (rel + c_j - c_i) = x2 + c_j.
struct PairShift {
  Vec2i du_p1;
  Vec2i du_p2;
};
PairShift shift_vectors(int i, int j);

/// One conditional modular shift: when bit `bit` of the p1 coordinate in
/// dimension `dim` is set, add `amount` to the p2 coordinate in the same
/// dimension, modulo that dimension's extent. dim: 0 = x, 1 = y.
struct PermutationStep {
  int dim;
  int bit;
  int amount;
};

/// Plan converting natural pair coordinates to relative ones: for each bit k
/// of each p1 dimension, subtract 2^k from the matching p2 dimension
/// (amount = -2^k). Length = log2(Lx) + log2(Ly).
std::vector<PermutationStep> permutation_plan(const LatticeGrid& grid);

/// Plan converting relative coordinates back to natural ones (adds instead
/// of subtracting).
std::vector<PermutationStep> inverse_permutation_plan(const LatticeGrid& grid);

/// Applies one descriptor to a pair-sector array laid out as
/// g[((p1*N + p2)*9 + i)*9 + j]: the value at (p1, p2) moves to (p1, p2')
/// where p2' applies the conditional shift.
std::vector<double> apply_permutation_step(const LatticeGrid& grid,
                                           const std::vector<double>& sector,
                                           const PermutationStep& step);

/// Applies a whole plan in order.
std::vector<double> apply_permutation_plan(
    const LatticeGrid& grid, std::vector<double> sector,
    const std::vector<PermutationStep>& plan);

/// Plan dump, one line per descriptor: "dim bit amount" with dim in {x, y}.
void write_plan(std::ostream& os, const std::vector<PermutationStep>& plan);
void write_plan(const std::string& path,
                const std::vector<PermutationStep>& plan);

/// Carleman state in encoded coordinates: f as usual, g at (x1, rel).
struct EncodedCarlemanState {
  LatticeGrid grid;
  int time = 0;
  std::vector<double> f;      ///< f[x1*9 + i]
  std::vector<double> g_rel;  ///< g[((x1*N + rel)*9 + i)*9 + j]

  explicit EncodedCarlemanState(const LatticeGrid& grid_);
};

/// Encoded state at time 0 (g = f0 tensor f0, stored relatively).
EncodedCarlemanState encoded_init(const DistributionField& f0);

/// Conversions to/from the dense natural-coordinate state.
EncodedCarlemanState to_encoded(const CarlemanState& state);
CarlemanState to_natural(const EncodedCarlemanState& state);

/// Site-local collision in encoded coordinates; the diagonal feedback for f
/// reads g at rel = 0.
EncodedCarlemanState encoded_collision(const EncodedCarlemanState& state,
                                       const CollisionTensors& tensors);

/// Streaming in encoded coordinates using shift_vectors per channel pair.
EncodedCarlemanState encoded_stream(const EncodedCarlemanState& state);

}  // namespace qlbm
