#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "qlbm/channels.hpp"
#include "qlbm/field.hpp"

namespace qlbm {

/// 9x9 matrix over channels, row-major: m[i*9 + j].
using Matrix9 = std::array<double, 81>;
/// 9x9x9 tensor over channels: t[(i*9 + j)*9 + k].
using Tensor9 = std::array<double, 729>;

constexpr int m9(int i, int j) { return i * 9 + j; }
constexpr int t9(int i, int j, int k) { return (i * 9 + j) * 9 + k; }

/// Polynomial expansion of the second-order equilibrium around unit density:
/// feq_i = sum_j linear_ij f_j + sum_jk quadratic_ijk f_j f_k
///         + sum_jkl cubic_ijkl f_j f_k f_l,
/// where the cubic coefficient is constant over its last index
/// (cubic_ijkl = cubic_slice_ijk for every l). The identity is exact when
/// the site density is 1 and first-order accurate in (rho - 1) otherwise.
struct EquilibriumTensors {
  Matrix9 linear;       ///< linear_ij = w_i (1 + (c_i.c_j)/cs2)
  Tensor9 quadratic;    ///< quadratic_ijk = (w_i/cs2^2)((c_i.c_j)(c_i.c_k) - cs2 (c_j.c_k))
  Tensor9 cubic_slice;  ///< cubic_slice = -quadratic/2 (per remaining index l)
};

/// BGK collision coefficients for the quadratically truncated update
/// f'_i = sum_j a_ij f_j + sum_jk b_ijk f_j f_k; the dropped cubic term has
/// coefficient c_slice_ijk (constant over its last index), used for a-priori
/// truncation-error bounds.
struct CollisionTensors {
  double tau = 0.0;
  double omega = 0.0;  ///< 1/tau
  Matrix9 a;           ///< (1 - omega) I + omega * linear
  Tensor9 b;           ///< omega * quadratic
  Tensor9 c_slice;     ///< -(omega/2) * quadratic
};

/// Builds both tensor families for the given channel set and relaxation time.
/// Throws std::invalid_argument unless tau > 0.
std::pair<EquilibriumTensors, CollisionTensors> build_tensors(
    const ChannelSet& channels, double tau);

/// Storage strategy for the pair field g.
enum class PairStorage {
  /// g kept as an explicit N*N*9*9 array in natural coordinates
  /// (x1, x2, i, j). Memory grows as sites^2; intended for Lx, Ly <= 8.
  kDense,
  /// g represented implicitly as f_lin (x1) tensor f_lin (x2), where f_lin
  /// evolves under the linear part of the dynamics (collision by `a`, then
  /// streaming). This reproduces the dense evolution of g exactly, because
  /// the pair sector evolves by a tensor-square operator throughout.
  kImplicit,
};

/// Second-order state: the distribution field f plus the pair field
/// g_ij(x1, x2), initialized as f tensor f.
struct CarlemanState {
  LatticeGrid grid;
  int time = 0;
  PairStorage storage = PairStorage::kDense;
  /// f[site*9 + i].
  std::vector<double> f;
  /// Dense mode: g[((x1*N + x2)*9 + i)*9 + j] with N = grid.sites().
  std::vector<double> g;
  /// Implicit mode: the linear companion field, same layout as f.
  std::vector<double> f_lin;

  explicit CarlemanState(const LatticeGrid& grid_,
                         PairStorage storage_ = PairStorage::kDense);

  /// Pair-field entry in natural coordinates; works in both storage modes.
  double g_at(int x1, int x2, int i, int j) const;
  /// The f sector as a distribution field (copies).
  DistributionField f_field() const;
};

/// State at time 0 for the initial condition f0: f copied, g = f0 tensor f0.
CarlemanState carleman_init(const DistributionField& f0,
                            PairStorage storage = PairStorage::kDense);

/// Site-local collision: f'_i(x) = sum_j a_ij f_j(x) + sum_jk b_ijk g_jk(x,x);
/// g'_ij(x1,x2) = sum_kl a_ik a_jl g_kl(x1,x2). No spatial mixing.
CarlemanState carleman_collision(const CarlemanState& state,
                                 const CollisionTensors& tensors);

/// Periodic streaming: f_i(x) -> x + c_i; g_ij(x1,x2) -> (x1 + c_i, x2 + c_j).
CarlemanState carleman_stream(const CarlemanState& state);

/// Runs `steps` iterations of collision followed by streaming from f0 and
/// returns all steps+1 states (initial state first).
std::vector<CarlemanState> carleman_run(
    const DistributionField& f0, double tau, int steps,
    PairStorage storage = PairStorage::kDense);

/// CSV dumps for regression testing: headers "i,j,value" / "i,j,k,value",
/// 17-significant-digit values.
void write_matrix_csv(std::ostream& os, const Matrix9& m);
void write_tensor_csv(std::ostream& os, const Tensor9& t);
void write_matrix_csv(const std::string& path, const Matrix9& m);
void write_tensor_csv(const std::string& path, const Tensor9& t);

}  // namespace qlbm
