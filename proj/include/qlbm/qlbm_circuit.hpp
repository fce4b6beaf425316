#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qlbm/carleman.hpp"
#include "qlbm/cost_model.hpp"
#include "qlbm/field.hpp"
#include "qlbm/statevector.hpp"

namespace qlbm {

/// The site-local collision update embedded on the 10-qubit channel block
/// (c1, c2, tau, a_diag): 16 * 16 * 2 * 2 = 1024 basis states. The operator
/// is the same at every lattice site, which is what the relative pair
/// encoding buys — it never touches a position register.
///
/// Block structure (Q = 9 physical channels):
///  - columns (j, 0, tau=0, a=0), j < Q: the linear relaxation `a` into rows
///    (i, 0, tau=0, a=0) — the f sector;
///  - columns (k, l, tau=1, a=1), k,l < Q: flagged diagonal pairs; receive
///    a tensor a into rows (i, j, tau=1, a=1) AND the quadratic feedback `b`
///    into the f-sector rows (i, 0, tau=0, a=0);
///  - columns (k, l, tau=1, a=0): a tensor a into rows (i, j, tau=1, a=0);
///  - all other columns (channel index >= Q, or tau=0 with c2 != 0 or a=1):
///    identity, so unused singular values stay at 1 and cost no
///    postselection probability.
struct EmbeddedCollisionOperator {
  static constexpr int kDim = 1024;
  /// Row-major kDim x kDim; real.
  std::vector<double> m;

  /// Basis index of the block: (c1 << 6) | (c2 << 2) | (tau << 1) | a_diag.
  static int basis(int c1, int c2, int tau, int a_diag) {
    return (c1 << 6) | (c2 << 2) | (tau << 1) | a_diag;
  }
  double at(int row, int col) const {
    return m[static_cast<size_t>(row) * kDim + col];
  }
};

EmbeddedCollisionOperator build_embedded_collision(
    const CollisionTensors& tensors);

/// Unitary splitting of the embedded collision operator:
/// m = s * u * ((d1 + d2)/2) * v, with u, v orthogonal (from the SVD
/// m = u * diag(sv) * v), d = sv / s in [0, 1], and
/// d1/d2 = d +- i*sqrt(1 - d^2) unit-modulus diagonals. s is the largest
/// singular value, restored through the classical global_scale.
struct LcuCollision {
  std::vector<double> u;   ///< row-major 1024 x 1024
  std::vector<double> v;   ///< row-major 1024 x 1024 (right factor)
  std::vector<double> d;   ///< 1024 scaled singular values in [0, 1]
  std::vector<cdouble> d1;
  std::vector<cdouble> d2;
  double s = 0.0;
};

LcuCollision lcu_decompose(const EmbeddedCollisionOperator& op);

/// Lightweight record of one applied gate for structural circuit audits
/// (payloads are intentionally not retained).
struct GateTrace {
  std::string phase;  ///< state_prep | permutation | collision_flag |
                      ///< collision | propagation
  GateKind kind;
  std::vector<int> touched;  ///< qubits the gate can alter
  std::vector<Control> controls;
};

/// Snapshot after one full algorithm step.
struct StepRecord {
  int step = 0;
  double success_probability = 1.0;
  double cumulative_probability = 1.0;
  double global_scale = 1.0;
  std::vector<double> f;  ///< decoded physical f, [site*9 + i]
  std::vector<double> g;  ///< decoded physical g, natural coords, pair blocks
  double a_diag_population = 0.0;
  double a_lcu_population = 0.0;
};

/// Full run output: per-step records, cost-model entries, and (shot mode)
/// the sampled counts plus count-estimated fields.
struct RunRecord {
  LatticeGrid grid{1, 1};
  int steps = 0;
  double tau = 0.0;
  std::vector<StepRecord> step_records;  ///< index 0 = prepared state
  std::vector<CostEntry> costs;

  long long shots = 0;
  long long shots_retained = 0;
  std::map<std::uint64_t, long long> counts;
  std::vector<double> f_estimated;  ///< from counts; empty in exact mode
  std::vector<double> g_estimated;  ///< natural coords; empty in exact mode

  double cumulative_probability() const {
    return step_records.empty() ? 1.0
                                : step_records.back().cumulative_probability;
  }
};

/// Composition of the full algorithm: state preparation with the
/// coordinate-conversion permutation, flagged LCU collision, controlled-shift
/// propagation, and measurement-side decoding.
class QlbmCircuit {
 public:
  QlbmCircuit(const LatticeGrid& grid, double tau);

  const RegisterLayout& layout() const { return layout_; }
  const EmbeddedCollisionOperator& embedded() const { return embedded_; }
  const LcuCollision& lcu() const { return lcu_; }
  const CollisionTensors& tensors() const { return tensors_; }

  /// Amplitude-encodes f0: the f sector at (x1, p2=0, i, c2=0, tau=0) and the
  /// pair sector f_i(x1) f_j(x2) at tau=1, then converts the pair sector to
  /// relative coordinates via the conditional-shift plan. global_scale is set
  /// so amplitude * global_scale = physical value. Throws
  /// std::invalid_argument on an identically zero field.
  StateVector prepare_initial_state(const DistributionField& f0);

  /// Flips a_diag exactly on (p2 = 0, tau = 1) basis states.
  void flag_diagonal(StateVector& state);
  void unflag_diagonal(StateVector& state);

  /// One collision: flag; v; mix a_lcu; d1/d2 controlled on a_lcu; unmix;
  /// u; postselect a_lcu = 0; unflag. Leaves the state proportional to
  /// (m/s) psi, multiplies global_scale by s (postselect already multiplied
  /// it by sqrt(p)), and returns the success probability p = ||(m/s) psi||^2.
  double collision_step(StateVector& state);

  /// Streaming: p1 += c_i controlled on c1 = i (both tau sectors); p2 +=
  /// c_j - c_i controlled on (c1 = i, c2 = j, tau = 1).
  void propagation_step(StateVector& state);

  /// Physical f from the tau=0 sector: [site*9 + i].
  std::vector<double> decode_f(const StateVector& state) const;
  /// Physical g from the tau=1 sector, converted back to natural
  /// coordinates: [((x1*N + x2)*9 + i)*9 + j].
  std::vector<double> decode_g(const StateVector& state) const;

  /// Full algorithm: prepare once, then `steps` iterations of collision and
  /// propagation. shots = 0 reads the exact amplitudes; shots > 0 adds one
  /// multinomial sample of the final state and count-based field estimates
  /// (amplitude ~ global_scale * sqrt(count / shots_retained), non-negative
  /// sign convention).
  RunRecord run(const DistributionField& f0, int steps, long long shots = 0,
                std::uint64_t seed = 0);

  /// Gates applied since the last clear_gate_log(), in order.
  const std::vector<GateTrace>& gate_log() const { return gate_log_; }
  void clear_gate_log() { gate_log_.clear(); }

 private:
  void apply_logged(StateVector& state, const GateOp& gate,
                    const std::string& phase);
  GateOp diagonal_flag_gate() const;

  LatticeGrid grid_;
  RegisterLayout layout_;
  CollisionTensors tensors_;
  EmbeddedCollisionOperator embedded_;
  LcuCollision lcu_;
  GateOp gate_u_, gate_v_, gate_d1_, gate_d2_;
  std::vector<GateTrace> gate_log_;
};

/// Rotation angle that splits the f and pair sectors during preparation:
/// alpha = 2*arcsin(sqrt(p)) with p = s2/(1 + s2), s2 = sum f^2. sin(alpha/2)^2
/// equals the prepared pair-sector weight. Throws on a zero field.
double sector_rotation_angle(const DistributionField& f0);

/// Per-site and per-pair mass observables: sigma_f(x) = sum_i f_i(x),
/// sigma_g(x1, x2) = sum_ij g_ij(x1, x2).
struct Observables {
  std::vector<double> sigma_f;  ///< [site]
  std::vector<double> sigma_g;  ///< [x1 * N + x2]
};

Observables estimate_observables(const LatticeGrid& grid,
                                 const std::vector<double>& f,
                                 const std::vector<double>& g);

}  // namespace qlbm
