#include "qlbm/statevector.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace qlbm {

namespace {

using RowMat =
    Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_square(size_t entries, size_t dim, const char* who) {
  if (entries != dim * dim) {
    throw std::invalid_argument(std::string(who) +
                                ": matrix size does not match target count");
  }
}

void check_unitary(const std::vector<cdouble>& m, size_t dim,
                   const char* who) {
  Eigen::Map<const RowMat> mat(m.data(), static_cast<Eigen::Index>(dim),
                               static_cast<Eigen::Index>(dim));
  const double dev =
      (mat.adjoint() * mat - RowMat::Identity(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim)))
          .cwiseAbs()
          .maxCoeff();
  if (!(dev <= 1e-12)) {
    throw std::invalid_argument(std::string(who) +
                                ": payload is not unitary (deviation " +
                                std::to_string(dev) + ")");
  }
}

void check_distinct_targets(const std::vector<int>& targets, const char* who) {
  std::vector<int> sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument(std::string(who) + ": duplicate target qubit");
  }
}

struct ControlMask {
  std::uint64_t mask = 0;
  std::uint64_t value = 0;
  bool matches(std::uint64_t idx) const { return (idx & mask) == value; }
};

ControlMask control_mask(const std::vector<Control>& controls) {
  ControlMask cm;
  for (const Control& c : controls) {
    const std::uint64_t bit = std::uint64_t{1} << c.qubit;
    if (cm.mask & bit) {
      throw std::invalid_argument("apply: duplicate control qubit");
    }
    cm.mask |= bit;
    if (c.value) {
      cm.value |= bit;
    }
  }
  return cm;
}

void validate_gate(const StateVector& state, const GateOp& gate) {
  const auto in_range = [&](int q) { return q >= 0 && q < state.n_qubits; };
  std::uint64_t touched = 0;
  for (int q : gate.touched_qubits()) {
    if (!in_range(q)) {
      throw std::invalid_argument("apply: qubit out of range");
    }
    touched |= std::uint64_t{1} << q;
  }
  for (const Control& c : gate.controls) {
    if (!in_range(c.qubit)) {
      throw std::invalid_argument("apply: control qubit out of range");
    }
    if (touched & (std::uint64_t{1} << c.qubit)) {
      throw std::invalid_argument("apply: control qubit overlaps target");
    }
  }
}

void apply_shift(StateVector& state, const GateOp& gate) {
  const ControlMask cm = control_mask(gate.controls);
  const std::uint64_t m = std::uint64_t{1} << gate.span.width;
  const std::uint64_t delta =
      static_cast<std::uint64_t>(((gate.delta % static_cast<std::int64_t>(m)) +
                                  static_cast<std::int64_t>(m)) %
                                 static_cast<std::int64_t>(m));
  if (delta == 0) {
    return;  // a conditional shift by zero is the identity
  }
  const std::uint64_t span_mask = (m - 1) << gate.span.offset;
  std::vector<cdouble> out(state.amp.size());
  for (std::uint64_t idx = 0; idx < state.dim(); ++idx) {
    std::uint64_t dst = idx;
    if (cm.matches(idx)) {
      const std::uint64_t r = (idx >> gate.span.offset) & (m - 1);
      const std::uint64_t r2 = (r + delta) & (m - 1);
      dst = (idx & ~span_mask) | (r2 << gate.span.offset);
    }
    out[dst] = state.amp[idx];
  }
  state.amp.swap(out);
}

void apply_diagonal(StateVector& state, const GateOp& gate) {
  const ControlMask cm = control_mask(gate.controls);
  const int t = static_cast<int>(gate.targets.size());
  for (std::uint64_t idx = 0; idx < state.dim(); ++idx) {
    if (!cm.matches(idx)) {
      continue;
    }
    std::uint64_t fiber = 0;
    for (int b = 0; b < t; ++b) {
      fiber |= ((idx >> gate.targets[b]) & 1) << b;
    }
    state.amp[idx] *= gate.diag[fiber];
  }
}

bool low_contiguous_targets(const std::vector<int>& targets) {
  for (size_t b = 0; b < targets.size(); ++b) {
    if (targets[b] != static_cast<int>(b)) {
      return false;
    }
  }
  return true;
}

/// Uncontrolled unitary on qubits 0..t-1: the state reshapes to a
/// (dim/2^t) x 2^t row-major matrix whose rows are the fibers, so the update
/// is one dense product per row block.
void apply_unitary_gemm(StateVector& state, const GateOp& gate) {
  const Eigen::Index fdim = Eigen::Index{1}
                            << static_cast<int>(gate.targets.size());
  const Eigen::Index rows =
      static_cast<Eigen::Index>(state.dim()) / fdim;
  Eigen::Map<const RowMat> m(gate.matrix.data(), fdim, fdim);
  const RowMat mt = m.transpose();
  Eigen::Map<RowMat> a(state.amp.data(), rows, fdim);
  const Eigen::Index block =
      std::max<Eigen::Index>(1, (Eigen::Index{1} << 22) / fdim);
  for (Eigen::Index r0 = 0; r0 < rows; r0 += block) {
    const Eigen::Index nb = std::min(block, rows - r0);
    a.middleRows(r0, nb) = (a.middleRows(r0, nb) * mt).eval();
  }
}

void apply_unitary_generic(StateVector& state, const GateOp& gate) {
  const ControlMask cm = control_mask(gate.controls);
  const int t = static_cast<int>(gate.targets.size());
  const std::uint64_t fdim = std::uint64_t{1} << t;

  std::uint64_t target_mask = 0;
  for (int q : gate.targets) {
    target_mask |= std::uint64_t{1} << q;
  }
  std::vector<std::uint64_t> spread(fdim, 0);
  for (std::uint64_t f = 0; f < fdim; ++f) {
    for (int b = 0; b < t; ++b) {
      spread[f] |= ((f >> b) & 1) << gate.targets[b];
    }
  }

  const std::uint64_t free_mask = (state.dim() - 1) & ~target_mask;
  std::vector<cdouble> in(fdim), out(fdim);
  std::uint64_t base = 0;
  while (true) {
    if (cm.matches(base)) {
      for (std::uint64_t f = 0; f < fdim; ++f) {
        in[f] = state.amp[base | spread[f]];
      }
      for (std::uint64_t r = 0; r < fdim; ++r) {
        cdouble acc = 0.0;
        const cdouble* row = &gate.matrix[r * fdim];
        for (std::uint64_t c = 0; c < fdim; ++c) {
          acc += row[c] * in[c];
        }
        out[r] = acc;
      }
      for (std::uint64_t f = 0; f < fdim; ++f) {
        state.amp[base | spread[f]] = out[f];
      }
    }
    if (base == free_mask) {
      break;
    }
    base = (base - free_mask) & free_mask;  // next subset of the free bits
  }
}

}  // namespace

RegisterLayout RegisterLayout::make(const LatticeGrid& grid) {
  RegisterLayout lo;
  lo.lx = grid.lx();
  lo.ly = grid.ly();
  lo.x_bits = grid.x_bits();
  lo.y_bits = grid.y_bits();
  int at = 0;
  const auto take = [&at](int width) {
    QubitSpan s{at, width};
    at += width;
    return s;
  };
  lo.a_diag = take(1);
  lo.tau = take(1);
  lo.c2 = take(4);
  lo.c1 = take(4);
  lo.a_lcu = take(1);
  lo.p2y = take(lo.y_bits);
  lo.p2x = take(lo.x_bits);
  lo.p1y = take(lo.y_bits);
  lo.p1x = take(lo.x_bits);
  lo.total = at;
  return lo;
}

std::uint64_t RegisterLayout::basis_index(int p1_site, int p2_site,
                                          int c1_value, int c2_value,
                                          int tau_value, int a_diag_value,
                                          int a_lcu_value) const {
  const std::uint64_t p1x_v = static_cast<std::uint64_t>(p1_site) / ly;
  const std::uint64_t p1y_v = static_cast<std::uint64_t>(p1_site) % ly;
  const std::uint64_t p2x_v = static_cast<std::uint64_t>(p2_site) / ly;
  const std::uint64_t p2y_v = static_cast<std::uint64_t>(p2_site) % ly;
  std::uint64_t idx = 0;
  idx |= static_cast<std::uint64_t>(a_diag_value) << a_diag.offset;
  idx |= static_cast<std::uint64_t>(tau_value) << tau.offset;
  idx |= static_cast<std::uint64_t>(c2_value) << c2.offset;
  idx |= static_cast<std::uint64_t>(c1_value) << c1.offset;
  idx |= static_cast<std::uint64_t>(a_lcu_value) << a_lcu.offset;
  idx |= p2y_v << p2y.offset;
  idx |= p2x_v << p2x.offset;
  idx |= p1y_v << p1y.offset;
  idx |= p1x_v << p1x.offset;
  return idx;
}

int RegisterLayout::p1_site(std::uint64_t idx) const {
  return static_cast<int>(field(idx, p1x) * ly + field(idx, p1y));
}

int RegisterLayout::p2_site(std::uint64_t idx) const {
  return static_cast<int>(field(idx, p2x) * ly + field(idx, p2y));
}

StateVector::StateVector(int n_qubits_) : n_qubits(n_qubits_) {
  if (n_qubits < 1 || n_qubits > 30) {
    throw std::invalid_argument("StateVector: qubit count out of range");
  }
  amp.assign(std::uint64_t{1} << n_qubits, cdouble{0.0, 0.0});
}

double StateVector::norm() const {
  double s = 0.0;
  for (const cdouble& a : amp) {
    s += std::norm(a);
  }
  return std::sqrt(s);
}

GateOp GateOp::unitary(std::vector<int> targets, std::vector<cdouble> matrix,
                       std::vector<Control> controls, std::string tag) {
  if (targets.empty()) {
    throw std::invalid_argument("GateOp::unitary: empty target list");
  }
  check_distinct_targets(targets, "GateOp::unitary");
  const size_t dim = size_t{1} << targets.size();
  check_square(matrix.size(), dim, "GateOp::unitary");
  check_unitary(matrix, dim, "GateOp::unitary");
  GateOp g;
  g.kind = GateKind::kUnitary;
  g.targets = std::move(targets);
  g.matrix = std::move(matrix);
  g.controls = std::move(controls);
  g.tag = std::move(tag);
  return g;
}

GateOp GateOp::diagonal(std::vector<int> targets, std::vector<cdouble> diag,
                        std::vector<Control> controls, std::string tag) {
  if (targets.empty()) {
    throw std::invalid_argument("GateOp::diagonal: empty target list");
  }
  check_distinct_targets(targets, "GateOp::diagonal");
  const size_t dim = size_t{1} << targets.size();
  if (diag.size() != dim) {
    throw std::invalid_argument(
        "GateOp::diagonal: entry count does not match target count");
  }
  for (const cdouble& d : diag) {
    if (std::abs(std::abs(d) - 1.0) > 1e-12) {
      throw std::invalid_argument(
          "GateOp::diagonal: entries must have unit modulus");
    }
  }
  GateOp g;
  g.kind = GateKind::kDiagonal;
  g.targets = std::move(targets);
  g.diag = std::move(diag);
  g.controls = std::move(controls);
  g.tag = std::move(tag);
  return g;
}

GateOp GateOp::register_shift(QubitSpan span, std::int64_t delta,
                              std::vector<Control> controls, std::string tag) {
  if (span.width < 1) {
    throw std::invalid_argument("GateOp::register_shift: empty span");
  }
  GateOp g;
  g.kind = GateKind::kShift;
  g.span = span;
  g.delta = delta;
  g.controls = std::move(controls);
  g.tag = std::move(tag);
  return g;
}

GateOp GateOp::ry(int qubit, double angle, std::vector<Control> controls,
                  std::string tag) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  return unitary({qubit}, {c, -s, s, c}, std::move(controls), std::move(tag));
}

GateOp GateOp::hadamard(int qubit, std::vector<Control> controls,
                        std::string tag) {
  const double r = 1.0 / std::sqrt(2.0);
  return unitary({qubit}, {r, r, r, -r}, std::move(controls), std::move(tag));
}

GateOp GateOp::pauli_x(int qubit, std::vector<Control> controls,
                       std::string tag) {
  return unitary({qubit}, {0.0, 1.0, 1.0, 0.0}, std::move(controls),
                 std::move(tag));
}

std::vector<int> GateOp::touched_qubits() const {
  if (kind == GateKind::kShift) {
    std::vector<int> qs(static_cast<size_t>(span.width));
    for (int b = 0; b < span.width; ++b) {
      qs[static_cast<size_t>(b)] = span.offset + b;
    }
    return qs;
  }
  return targets;
}

void apply(StateVector& state, const GateOp& gate) {
  validate_gate(state, gate);
  switch (gate.kind) {
    case GateKind::kShift:
      apply_shift(state, gate);
      return;
    case GateKind::kDiagonal:
      apply_diagonal(state, gate);
      return;
    case GateKind::kUnitary:
      if (gate.controls.empty() && low_contiguous_targets(gate.targets)) {
        apply_unitary_gemm(state, gate);
      } else {
        apply_unitary_generic(state, gate);
      }
      return;
  }
  throw std::logic_error("apply: unknown gate kind");
}

double register_population(const StateVector& state, QubitSpan span,
                           std::uint64_t value) {
  const std::uint64_t m = (std::uint64_t{1} << span.width) - 1;
  double p = 0.0;
  for (std::uint64_t idx = 0; idx < state.dim(); ++idx) {
    if (((idx >> span.offset) & m) == value) {
      p += std::norm(state.amp[idx]);
    }
  }
  return p;
}

double postselect(StateVector& state, QubitSpan span, std::uint64_t value) {
  const std::uint64_t m = (std::uint64_t{1} << span.width) - 1;
  const double p = register_population(state, span, value);
  if (p < 1e-300) {
    throw postselection_error("postselection impossible: branch probability " +
                              std::to_string(p));
  }
  const double inv = 1.0 / std::sqrt(p);
  for (std::uint64_t idx = 0; idx < state.dim(); ++idx) {
    if (((idx >> span.offset) & m) == value) {
      state.amp[idx] *= inv;
    } else {
      state.amp[idx] = 0.0;
    }
  }
  state.global_scale *= std::sqrt(p);
  return p;
}

std::map<std::uint64_t, long long> sample_counts(const StateVector& state,
                                                 long long shots,
                                                 std::uint64_t seed) {
  if (shots < 1) {
    throw std::invalid_argument("sample_counts: shots must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::map<std::uint64_t, long long> counts;

  double total = 0.0;
  std::uint64_t top_idx = 0;
  double top_p = -1.0;
  for (std::uint64_t idx = 0; idx < state.dim(); ++idx) {
    const double p = std::norm(state.amp[idx]);
    total += p;
    if (p > top_p) {
      top_p = p;
      top_idx = idx;
    }
  }

  long long remaining_shots = shots;
  double remaining_prob = total;
  for (std::uint64_t idx = 0; idx < state.dim() && remaining_shots > 0;
       ++idx) {
    const double p = std::norm(state.amp[idx]);
    if (p <= 0.0) {
      continue;
    }
    if (remaining_prob <= p) {
      counts[idx] += remaining_shots;
      remaining_shots = 0;
      break;
    }
    const double q = std::min(1.0, p / remaining_prob);
    std::binomial_distribution<long long> binom(remaining_shots, q);
    const long long k = binom(rng);
    if (k > 0) {
      counts[idx] += k;
      remaining_shots -= k;
    }
    remaining_prob -= p;
  }
  if (remaining_shots > 0) {
    counts[top_idx] += remaining_shots;  // float-rounding leftovers
  }
  return counts;
}

void write_counts_csv(std::ostream& os,
                      const std::map<std::uint64_t, long long>& counts,
                      int n_qubits) {
  os << "bitstring,count\n";
  for (const auto& [idx, count] : counts) {
    std::string bits(static_cast<size_t>(n_qubits), '0');
    for (int q = 0; q < n_qubits; ++q) {
      if ((idx >> q) & 1) {
        bits[static_cast<size_t>(n_qubits - 1 - q)] = '1';
      }
    }
    os << bits << ',' << count << '\n';
  }
}

}  // namespace qlbm
