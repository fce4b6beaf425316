#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlbm/lattice.hpp"

namespace qlbm {

using cdouble = std::complex<double>;

/// Contiguous run of qubits [offset, offset + width).
struct QubitSpan {
  int offset = 0;
  int width = 0;
};

/// Qubit assignment for the pair-encoded state. Order from least significant
/// bit upward: a_diag, tau, c2 (4), c1 (4), a_lcu, p2y, p2x, p1y, p1x.
/// Keeping the channel/flag registers in the low bits makes the collision
/// operator act on a contiguous low-order block of every basis index.
struct RegisterLayout {
  int lx = 0;
  int ly = 0;
  int x_bits = 0;
  int y_bits = 0;
  int total = 0;
  QubitSpan a_diag, tau, c2, c1, a_lcu, p2y, p2x, p1y, p1x;

  static RegisterLayout make(const LatticeGrid& grid);

  /// Bits of `idx` covered by `span`, shifted down to position 0.
  static std::uint64_t field(std::uint64_t idx, QubitSpan span) {
    return (idx >> span.offset) & ((std::uint64_t{1} << span.width) - 1);
  }

  /// Basis index from register values. Site indices use the grid convention
  /// site = x * Ly + y, so the y bits sit below the x bits in each position
  /// register.
  std::uint64_t basis_index(int p1_site, int p2_site, int c1_value,
                            int c2_value, int tau_value, int a_diag_value,
                            int a_lcu_value) const;

  int p1_site(std::uint64_t idx) const;
  int p2_site(std::uint64_t idx) const;
};

/// Dense complex statevector plus the classical scale factor that converts
/// amplitudes back to physical units (physical = amplitude * global_scale).
struct StateVector {
  int n_qubits = 0;
  std::vector<cdouble> amp;
  double global_scale = 1.0;

  explicit StateVector(int n_qubits_);
  std::uint64_t dim() const { return std::uint64_t{1} << n_qubits; }
  double norm() const;
};

/// Single control terminal: gate acts only where qubit == value.
struct Control {
  int qubit;
  bool value;
};

enum class GateKind {
  kUnitary,   ///< dense matrix on an ordered target list
  kDiagonal,  ///< unit-modulus diagonal on an ordered target list
  kShift,     ///< modular increment of a register span
};

/// One circuit operation. Construct through the factories, which validate
/// shapes and unitarity (1e-12) up front.
struct GateOp {
  GateKind kind = GateKind::kUnitary;
  std::vector<int> targets;      ///< unitary/diagonal; targets[0] = fiber LSB
  std::vector<Control> controls;
  std::vector<cdouble> matrix;   ///< row-major dim x dim (kUnitary)
  std::vector<cdouble> diag;     ///< length dim (kDiagonal)
  QubitSpan span;                ///< kShift
  std::int64_t delta = 0;        ///< kShift increment
  std::string tag;               ///< free-form label for circuit audits

  static GateOp unitary(std::vector<int> targets, std::vector<cdouble> matrix,
                        std::vector<Control> controls = {},
                        std::string tag = {});
  static GateOp diagonal(std::vector<int> targets, std::vector<cdouble> diag,
                         std::vector<Control> controls = {},
                         std::string tag = {});
  static GateOp register_shift(QubitSpan span, std::int64_t delta,
                               std::vector<Control> controls = {},
                               std::string tag = {});
  static GateOp ry(int qubit, double angle, std::vector<Control> controls = {},
                   std::string tag = {});
  static GateOp hadamard(int qubit, std::vector<Control> controls = {},
                         std::string tag = {});
  static GateOp pauli_x(int qubit, std::vector<Control> controls = {},
                        std::string tag = {});

  /// Qubits the gate changes (targets or shifted span), excluding controls.
  std::vector<int> touched_qubits() const;
};

/// Applies one gate. Throws std::invalid_argument if the gate does not fit
/// the state (target out of range, control overlapping a target, ...).
void apply(StateVector& state, const GateOp& gate);

/// Raised when a postselection branch has no probability mass.
struct postselection_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Probability mass currently on span == value (no state change).
double register_population(const StateVector& state, QubitSpan span,
                           std::uint64_t value);

/// Projects onto span == value, renormalizes, and returns the branch
/// probability. global_scale is multiplied by sqrt(probability) so that
/// amplitude * global_scale still reproduces physical values afterwards.
/// Throws postselection_error when the probability is below 1e-300.
double postselect(StateVector& state, QubitSpan span, std::uint64_t value);

/// One multinomial draw of `shots` outcomes from |amplitudes|^2.
/// Deterministic for a fixed seed; counts sum to shots; only nonzero counts
/// are returned.
std::map<std::uint64_t, long long> sample_counts(const StateVector& state,
                                                 long long shots,
                                                 std::uint64_t seed);

/// CSV "bitstring,count", most significant qubit first, ascending index.
void write_counts_csv(std::ostream& os,
                      const std::map<std::uint64_t, long long>& counts,
                      int n_qubits);

}  // namespace qlbm
