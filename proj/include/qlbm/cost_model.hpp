#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qlbm/lattice.hpp"

namespace qlbm {

/// Analytic gate-count model for the pair-encoded circuit. Gate-level
/// decompositions are not simulated; each emulated primitive is charged its
/// standard asymptotic count so that depth claims can be validated as scaling
/// curves:
///   - modular register shift / multi-controlled flip: log2(N)^2
///   - dense unitary on the channel block: 9^3
///   - diagonal on the channel block: 9^2
///   - amplitude (un)loading: N * 9
/// with N the number of lattice sites.
class CostModel {
 public:
  explicit CostModel(const LatticeGrid& grid);

  int site_bits() const { return site_bits_; }

  long long register_shift() const { return sq(site_bits_); }
  long long multi_controlled_flip() const { return sq(site_bits_); }
  long long dense_channel_unitary() const { return 9LL * 9 * 9; }
  long long channel_diagonal() const { return 9LL * 9; }
  long long amplitude_load() const { return sites_ * 9LL; }

  /// Shift descriptors per propagation step: one per nonzero per-dimension
  /// displacement over channels (base coordinate) and channel pairs
  /// (relative coordinate). Grid-independent.
  static int propagation_shift_count();

  /// Coordinate-conversion phase: one conditional shift per position bit.
  long long permutation_phase() const {
    return site_bits_ * register_shift();
  }
  /// Collision per step: flag + unflag, two dense factors, two split
  /// diagonals, two mixing gates on the select qubit.
  long long collision_phase() const {
    return 2 * multi_controlled_flip() + 2 * dense_channel_unitary() +
           2 * channel_diagonal() + 2;
  }
  long long propagation_phase() const {
    return propagation_shift_count() * register_shift();
  }
  long long per_step() const { return collision_phase() + propagation_phase(); }

 private:
  static long long sq(long long v) { return v * v; }
  int site_bits_;
  long long sites_;
};

/// One line of the cost report.
struct CostEntry {
  int step;
  std::string component;
  long long count;
};

/// CSV with header "step,component,gate_count_model".
void write_cost_csv(std::ostream& os, const std::vector<CostEntry>& entries);
void write_cost_csv(const std::string& path,
                    const std::vector<CostEntry>& entries);

}  // namespace qlbm
