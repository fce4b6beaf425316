#include "qlbm/qlbm_circuit.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qlbm/channels.hpp"
#include "qlbm/local_encoding.hpp"

namespace qlbm {

namespace {

constexpr int kBlockDim = EmbeddedCollisionOperator::kDim;

std::vector<cdouble> complexify(const std::vector<double>& m) {
  std::vector<cdouble> out(m.size());
  for (size_t k = 0; k < m.size(); ++k) {
    out[k] = m[k];
  }
  return out;
}

std::vector<Control> register_equals(QubitSpan span, int value,
                                     std::vector<Control> extra = {}) {
  std::vector<Control> controls = std::move(extra);
  for (int b = 0; b < span.width; ++b) {
    controls.push_back({span.offset + b, ((value >> b) & 1) != 0});
  }
  return controls;
}

}  // namespace

EmbeddedCollisionOperator build_embedded_collision(
    const CollisionTensors& tensors) {
  EmbeddedCollisionOperator op;
  op.m.assign(static_cast<size_t>(kBlockDim) * kBlockDim, 0.0);
  for (int k = 0; k < kBlockDim; ++k) {
    op.m[static_cast<size_t>(k) * kBlockDim + k] = 1.0;
  }
  const auto clear_column = [&op](int col) {
    for (int row = 0; row < kBlockDim; ++row) {
      op.m[static_cast<size_t>(row) * kBlockDim + col] = 0.0;
    }
  };
  const auto set = [&op](int row, int col, double v) {
    op.m[static_cast<size_t>(row) * kBlockDim + col] = v;
  };
  const auto basis = EmbeddedCollisionOperator::basis;

  // f sector: linear relaxation.
  for (int j = 0; j < 9; ++j) {
    const int col = basis(j, 0, 0, 0);
    clear_column(col);
    for (int i = 0; i < 9; ++i) {
      set(basis(i, 0, 0, 0), col, tensors.a[m9(i, j)]);
    }
  }
  // Unflagged pair sector: tensor square of the linear relaxation.
  for (int k = 0; k < 9; ++k) {
    for (int l = 0; l < 9; ++l) {
      const int col = basis(k, l, 1, 0);
      clear_column(col);
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          set(basis(i, j, 1, 0), col, tensors.a[m9(i, k)] * tensors.a[m9(j, l)]);
        }
      }
    }
  }
  // Flagged diagonal pairs: same tensor square, plus the quadratic feedback
  // into the f sector.
  for (int k = 0; k < 9; ++k) {
    for (int l = 0; l < 9; ++l) {
      const int col = basis(k, l, 1, 1);
      clear_column(col);
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          set(basis(i, j, 1, 1), col, tensors.a[m9(i, k)] * tensors.a[m9(j, l)]);
        }
        set(basis(i, 0, 0, 0), col, tensors.b[t9(i, k, l)]);
      }
    }
  }
  return op;
}

LcuCollision lcu_decompose(const EmbeddedCollisionOperator& op) {
  Eigen::MatrixXd m(kBlockDim, kBlockDim);
  for (int r = 0; r < kBlockDim; ++r) {
    for (int c = 0; c < kBlockDim; ++c) {
      m(r, c) = op.at(r, c);
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw std::runtime_error("lcu_decompose: SVD did not converge");
  }

  LcuCollision lcu;
  lcu.s = svd.singularValues()(0);
  if (!(lcu.s > 0.0)) {
    throw std::runtime_error("lcu_decompose: zero operator");
  }
  lcu.u.resize(static_cast<size_t>(kBlockDim) * kBlockDim);
  lcu.v.resize(static_cast<size_t>(kBlockDim) * kBlockDim);
  for (int r = 0; r < kBlockDim; ++r) {
    for (int c = 0; c < kBlockDim; ++c) {
      lcu.u[static_cast<size_t>(r) * kBlockDim + c] = svd.matrixU()(r, c);
      // Right factor: v = (matrixV)^T so that m = u * diag(sv) * v.
      lcu.v[static_cast<size_t>(r) * kBlockDim + c] = svd.matrixV()(c, r);
    }
  }
  lcu.d.resize(kBlockDim);
  lcu.d1.resize(kBlockDim);
  lcu.d2.resize(kBlockDim);
  for (int k = 0; k < kBlockDim; ++k) {
    const double d = std::min(1.0, svd.singularValues()(k) / lcu.s);
    lcu.d[k] = d;
    const double off = std::sqrt(std::max(0.0, 1.0 - d * d));
    lcu.d1[k] = cdouble{d, off};
    lcu.d2[k] = cdouble{d, -off};
  }
  return lcu;
}

QlbmCircuit::QlbmCircuit(const LatticeGrid& grid, double tau)
    : grid_(grid), layout_(RegisterLayout::make(grid)) {
  tensors_ = build_tensors(d2q9(), tau).second;
  embedded_ = build_embedded_collision(tensors_);
  lcu_ = lcu_decompose(embedded_);

  std::vector<int> block(10);
  std::iota(block.begin(), block.end(), 0);
  gate_v_ = GateOp::unitary(block, complexify(lcu_.v), {},
                            "collision-right-factor");
  gate_u_ = GateOp::unitary(block, complexify(lcu_.u), {},
                            "collision-left-factor");
  gate_d1_ = GateOp::diagonal(block, lcu_.d1,
                              {{layout_.a_lcu.offset, false}},
                              "collision-split-plus");
  gate_d2_ = GateOp::diagonal(block, lcu_.d2, {{layout_.a_lcu.offset, true}},
                              "collision-split-minus");
}

void QlbmCircuit::apply_logged(StateVector& state, const GateOp& gate,
                               const std::string& phase) {
  gate_log_.push_back({phase, gate.kind, gate.touched_qubits(), gate.controls});
  apply(state, gate);
}

double sector_rotation_angle(const DistributionField& f0) {
  double s2 = 0.0;
  for (double v : f0.values) {
    s2 += v * v;
  }
  if (s2 <= 0.0) {
    throw std::invalid_argument("sector_rotation_angle: zero field");
  }
  const double p = s2 / (1.0 + s2);
  return 2.0 * std::asin(std::sqrt(p));
}

StateVector QlbmCircuit::prepare_initial_state(const DistributionField& f0) {
  if (!(f0.grid == grid_)) {
    throw std::invalid_argument(
        "prepare_initial_state: field grid does not match circuit grid");
  }
  double s2 = 0.0;
  for (double v : f0.values) {
    s2 += v * v;
  }
  if (s2 <= 0.0) {
    throw std::invalid_argument("prepare_initial_state: zero field");
  }
  const double z = std::sqrt(s2 + s2 * s2);
  const int n = grid_.sites();

  StateVector state(layout_.total);
  for (int x = 0; x < n; ++x) {
    for (int i = 0; i < 9; ++i) {
      state.amp[layout_.basis_index(x, 0, i, 0, 0, 0, 0)] =
          f0.at(x, i) / z;
    }
  }
  for (int x1 = 0; x1 < n; ++x1) {
    for (int x2 = 0; x2 < n; ++x2) {
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          state.amp[layout_.basis_index(x1, x2, i, j, 1, 0, 0)] =
              f0.at(x1, i) * f0.at(x2, j) / z;
        }
      }
    }
  }
  state.global_scale = z;
  gate_log_.push_back({"state_prep", GateKind::kUnitary, {}, {}});

  // Convert the pair sector to relative coordinates; the f sector (tau = 0)
  // must keep p2 = 0, so every conditional shift is also controlled on tau.
  for (const PermutationStep& step : permutation_plan(grid_)) {
    const QubitSpan span = (step.dim == 0) ? layout_.p2x : layout_.p2y;
    const int control_qubit =
        ((step.dim == 0) ? layout_.p1x.offset : layout_.p1y.offset) + step.bit;
    apply_logged(state,
                 GateOp::register_shift(
                     span, step.amount,
                     {{control_qubit, true}, {layout_.tau.offset, true}},
                     "coordinate-conversion"),
                 "permutation");
  }
  return state;
}

GateOp QlbmCircuit::diagonal_flag_gate() const {
  std::vector<Control> controls;
  controls.push_back({layout_.tau.offset, true});
  for (int b = 0; b < layout_.p2x.width; ++b) {
    controls.push_back({layout_.p2x.offset + b, false});
  }
  for (int b = 0; b < layout_.p2y.width; ++b) {
    controls.push_back({layout_.p2y.offset + b, false});
  }
  return GateOp::pauli_x(layout_.a_diag.offset, std::move(controls),
                         "diagonal-flag");
}

void QlbmCircuit::flag_diagonal(StateVector& state) {
  apply_logged(state, diagonal_flag_gate(), "collision_flag");
}

void QlbmCircuit::unflag_diagonal(StateVector& state) {
  apply_logged(state, diagonal_flag_gate(), "collision_flag");
}

double QlbmCircuit::collision_step(StateVector& state) {
  flag_diagonal(state);
  apply_logged(state, gate_v_, "collision");
  apply_logged(state,
               GateOp::hadamard(layout_.a_lcu.offset, {}, "select-mix"),
               "collision");
  apply_logged(state, gate_d1_, "collision");
  apply_logged(state, gate_d2_, "collision");
  apply_logged(state,
               GateOp::hadamard(layout_.a_lcu.offset, {}, "select-unmix"),
               "collision");
  apply_logged(state, gate_u_, "collision");
  const double p = postselect(state, layout_.a_lcu, 0);
  state.global_scale *= lcu_.s;
  unflag_diagonal(state);
  return p;
}

void QlbmCircuit::propagation_step(StateVector& state) {
  const ChannelSet& ch = d2q9();
  // Base coordinate: p1 += c_i on both tau sectors.
  for (int i = 0; i < 9; ++i) {
    const Vec2i c = ch.velocity[i];
    if (c.x != 0 && layout_.p1x.width > 0) {
      apply_logged(state,
                   GateOp::register_shift(layout_.p1x, c.x,
                                          register_equals(layout_.c1, i),
                                          "base-shift-x"),
                   "propagation");
    }
    if (c.y != 0 && layout_.p1y.width > 0) {
      apply_logged(state,
                   GateOp::register_shift(layout_.p1y, c.y,
                                          register_equals(layout_.c1, i),
                                          "base-shift-y"),
                   "propagation");
    }
  }
  // Relative coordinate: p2 += c_j - c_i on the pair sector only.
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      const Vec2i d = ch.velocity[j] - ch.velocity[i];
      if (d.x == 0 && d.y == 0) {
        continue;
      }
      std::vector<Control> controls = register_equals(
          layout_.c2, j,
          register_equals(layout_.c1, i, {{layout_.tau.offset, true}}));
      if (d.x != 0 && layout_.p2x.width > 0) {
        apply_logged(state,
                     GateOp::register_shift(layout_.p2x, d.x, controls,
                                            "relative-shift-x"),
                     "propagation");
      }
      if (d.y != 0 && layout_.p2y.width > 0) {
        apply_logged(state,
                     GateOp::register_shift(layout_.p2y, d.y, controls,
                                            "relative-shift-y"),
                     "propagation");
      }
    }
  }
}

std::vector<double> QlbmCircuit::decode_f(const StateVector& state) const {
  const int n = grid_.sites();
  std::vector<double> f(static_cast<size_t>(n) * 9);
  for (int x = 0; x < n; ++x) {
    for (int i = 0; i < 9; ++i) {
      f[static_cast<size_t>(x) * 9 + i] =
          state.amp[layout_.basis_index(x, 0, i, 0, 0, 0, 0)].real() *
          state.global_scale;
    }
  }
  return f;
}

std::vector<double> QlbmCircuit::decode_g(const StateVector& state) const {
  const size_t n = static_cast<size_t>(grid_.sites());
  std::vector<double> g(n * n * 81, 0.0);
  for (int x1 = 0; x1 < static_cast<int>(n); ++x1) {
    for (int rel = 0; rel < static_cast<int>(n); ++rel) {
      const int x2 = absolute_site(grid_, x1, rel);
      double* block = &g[(static_cast<size_t>(x1) * n + x2) * 81];
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          block[m9(i, j)] =
              state.amp[layout_.basis_index(x1, rel, i, j, 1, 0, 0)].real() *
              state.global_scale;
        }
      }
    }
  }
  return g;
}

RunRecord QlbmCircuit::run(const DistributionField& f0, int steps,
                           long long shots, std::uint64_t seed) {
  if (steps < 1) {
    throw std::invalid_argument("run: steps must be >= 1");
  }
  RunRecord rec;
  rec.grid = grid_;
  rec.steps = steps;
  rec.tau = tensors_.tau;

  clear_gate_log();
  StateVector state = prepare_initial_state(f0);
  const CostModel cm(grid_);
  rec.costs.push_back({0, "state_prep", cm.amplitude_load()});
  rec.costs.push_back({0, "permutation", cm.permutation_phase()});

  const auto record = [&](int step, double p, double cum) {
    StepRecord sr;
    sr.step = step;
    sr.success_probability = p;
    sr.cumulative_probability = cum;
    sr.global_scale = state.global_scale;
    sr.f = decode_f(state);
    sr.g = decode_g(state);
    sr.a_diag_population = register_population(state, layout_.a_diag, 1);
    sr.a_lcu_population = register_population(state, layout_.a_lcu, 1);
    rec.step_records.push_back(std::move(sr));
  };
  record(0, 1.0, 1.0);

  double cumulative = 1.0;
  for (int t = 1; t <= steps; ++t) {
    const double p = collision_step(state);
    propagation_step(state);
    cumulative *= p;
    record(t, p, cumulative);
    rec.costs.push_back({t, "collision_flag", 2 * cm.multi_controlled_flip()});
    rec.costs.push_back({t, "collision_dense", 2 * cm.dense_channel_unitary()});
    rec.costs.push_back(
        {t, "collision_diagonal", 2 * cm.channel_diagonal()});
    rec.costs.push_back({t, "collision_mix", 2});
    rec.costs.push_back({t, "propagation", cm.propagation_phase()});
  }
  rec.costs.push_back({steps, "measurement", cm.amplitude_load()});

  if (shots > 0) {
    rec.shots = shots;
    rec.counts = sample_counts(state, shots, seed);
    long long retained = 0;
    for (const auto& [idx, count] : rec.counts) {
      if (RegisterLayout::field(idx, layout_.a_lcu) == 0 &&
          RegisterLayout::field(idx, layout_.a_diag) == 0) {
        retained += count;
      }
    }
    rec.shots_retained = retained;
    const int n = grid_.sites();
    rec.f_estimated.assign(static_cast<size_t>(n) * 9, 0.0);
    rec.g_estimated.assign(static_cast<size_t>(n) * n * 81, 0.0);
    if (retained > 0) {
      const auto estimate = [&](std::uint64_t idx) {
        const auto it = rec.counts.find(idx);
        if (it == rec.counts.end()) {
          return 0.0;
        }
        return state.global_scale *
               std::sqrt(static_cast<double>(it->second) /
                         static_cast<double>(retained));
      };
      for (int x = 0; x < n; ++x) {
        for (int i = 0; i < 9; ++i) {
          rec.f_estimated[static_cast<size_t>(x) * 9 + i] =
              estimate(layout_.basis_index(x, 0, i, 0, 0, 0, 0));
        }
      }
      for (int x1 = 0; x1 < n; ++x1) {
        for (int rel = 0; rel < n; ++rel) {
          const int x2 = absolute_site(grid_, x1, rel);
          double* block =
              &rec.g_estimated[(static_cast<size_t>(x1) * n + x2) * 81];
          for (int i = 0; i < 9; ++i) {
            for (int j = 0; j < 9; ++j) {
              block[m9(i, j)] =
                  estimate(layout_.basis_index(x1, rel, i, j, 1, 0, 0));
            }
          }
        }
      }
    }
  }
  return rec;
}

Observables estimate_observables(const LatticeGrid& grid,
                                 const std::vector<double>& f,
                                 const std::vector<double>& g) {
  const size_t n = static_cast<size_t>(grid.sites());
  if (f.size() != n * 9 || g.size() != n * n * 81) {
    throw std::invalid_argument("estimate_observables: array sizes mismatch");
  }
  Observables obs;
  obs.sigma_f.assign(n, 0.0);
  for (size_t x = 0; x < n; ++x) {
    for (int i = 0; i < 9; ++i) {
      obs.sigma_f[x] += f[x * 9 + i];
    }
  }
  obs.sigma_g.assign(n * n, 0.0);
  for (size_t p = 0; p < n * n; ++p) {
    for (int k = 0; k < 81; ++k) {
      obs.sigma_g[p] += g[p * 81 + k];
    }
  }
  return obs;
}

}  // namespace qlbm
