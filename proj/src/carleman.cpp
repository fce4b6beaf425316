#include "qlbm/carleman.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qlbm {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// out = a * in over channels, one site: out_i = sum_j a_ij in_j.
void apply_matrix(const Matrix9& a, const double* in, double* out) {
  for (int i = 0; i < 9; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 9; ++j) {
      acc += a[m9(i, j)] * in[j];
    }
    out[i] = acc;
  }
}

/// out = a * gin * a^T for one 9x9 pair block: out_ij = sum_kl a_ik a_jl g_kl.
void apply_matrix_pair(const Matrix9& a, const double* gin, double* out) {
  double tmp[81];  // tmp_il = sum_k a_ik g_kl
  for (int i = 0; i < 9; ++i) {
    for (int l = 0; l < 9; ++l) {
      double acc = 0.0;
      for (int k = 0; k < 9; ++k) {
        acc += a[m9(i, k)] * gin[m9(k, l)];
      }
      tmp[m9(i, l)] = acc;
    }
  }
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      double acc = 0.0;
      for (int l = 0; l < 9; ++l) {
        acc += tmp[m9(i, l)] * a[m9(j, l)];
      }
      out[m9(i, j)] = acc;
    }
  }
}

}  // namespace

std::pair<EquilibriumTensors, CollisionTensors> build_tensors(
    const ChannelSet& channels, double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("build_tensors: tau must be positive");
  }
  const double cs2 = ChannelSet::kCs2;
  EquilibriumTensors eq;
  for (int i = 0; i < 9; ++i) {
    const double wi = channels.weight[i];
    for (int j = 0; j < 9; ++j) {
      eq.linear[m9(i, j)] = wi * (1.0 + channels.dot(i, j) / cs2);
      for (int k = 0; k < 9; ++k) {
        const double q = wi / (cs2 * cs2) *
                         (channels.dot(i, j) * channels.dot(i, k) -
                          cs2 * channels.dot(j, k));
        eq.quadratic[t9(i, j, k)] = q;
        eq.cubic_slice[t9(i, j, k)] = -0.5 * q;
      }
    }
  }

  CollisionTensors col;
  col.tau = tau;
  col.omega = 1.0 / tau;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      const double kron = (i == j) ? 1.0 : 0.0;
      col.a[m9(i, j)] = (1.0 - col.omega) * kron + col.omega * eq.linear[m9(i, j)];
    }
  }
  for (int idx = 0; idx < 729; ++idx) {
    col.b[idx] = col.omega * eq.quadratic[idx];
    col.c_slice[idx] = -0.5 * col.omega * eq.quadratic[idx];
  }
  return {eq, col};
}

CarlemanState::CarlemanState(const LatticeGrid& grid_, PairStorage storage_)
    : grid(grid_), storage(storage_) {
  const size_t n = static_cast<size_t>(grid.sites());
  f.assign(n * 9, 0.0);
  if (storage == PairStorage::kDense) {
    g.assign(n * n * 81, 0.0);
  } else {
    f_lin.assign(n * 9, 0.0);
  }
}

double CarlemanState::g_at(int x1, int x2, int i, int j) const {
  if (storage == PairStorage::kDense) {
    const size_t n = static_cast<size_t>(grid.sites());
    return g[((static_cast<size_t>(x1) * n + x2) * 9 + i) * 9 + j];
  }
  return f_lin[static_cast<size_t>(x1) * 9 + i] *
         f_lin[static_cast<size_t>(x2) * 9 + j];
}

DistributionField CarlemanState::f_field() const {
  DistributionField out(grid);
  out.time = time;
  out.values = f;
  return out;
}

CarlemanState carleman_init(const DistributionField& f0, PairStorage storage) {
  CarlemanState st(f0.grid, storage);
  st.time = f0.time;
  st.f = f0.values;
  if (storage == PairStorage::kDense) {
    const size_t n = static_cast<size_t>(f0.grid.sites());
    for (size_t x1 = 0; x1 < n; ++x1) {
      for (size_t x2 = 0; x2 < n; ++x2) {
        double* block = &st.g[(x1 * n + x2) * 81];
        for (int i = 0; i < 9; ++i) {
          for (int j = 0; j < 9; ++j) {
            block[m9(i, j)] = f0.values[x1 * 9 + i] * f0.values[x2 * 9 + j];
          }
        }
      }
    }
  } else {
    st.f_lin = f0.values;
  }
  return st;
}

CarlemanState carleman_collision(const CarlemanState& state,
                                 const CollisionTensors& tensors) {
  const size_t n = static_cast<size_t>(state.grid.sites());
  CarlemanState out(state.grid, state.storage);
  out.time = state.time;

  for (size_t x = 0; x < n; ++x) {
    apply_matrix(tensors.a, &state.f[x * 9], &out.f[x * 9]);
    // Quadratic feedback from the pair diagonal g(x, x).
    double diag[81];
    for (int j = 0; j < 9; ++j) {
      for (int k = 0; k < 9; ++k) {
        diag[m9(j, k)] = state.g_at(static_cast<int>(x), static_cast<int>(x),
                                    j, k);
      }
    }
    for (int i = 0; i < 9; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 9; ++j) {
        for (int k = 0; k < 9; ++k) {
          acc += tensors.b[t9(i, j, k)] * diag[m9(j, k)];
        }
      }
      out.f[x * 9 + i] += acc;
    }
  }

  if (state.storage == PairStorage::kDense) {
    for (size_t p = 0; p < n * n; ++p) {
      apply_matrix_pair(tensors.a, &state.g[p * 81], &out.g[p * 81]);
    }
  } else {
    for (size_t x = 0; x < n; ++x) {
      apply_matrix(tensors.a, &state.f_lin[x * 9], &out.f_lin[x * 9]);
    }
  }
  return out;
}

CarlemanState carleman_stream(const CarlemanState& state) {
  const ChannelSet& ch = d2q9();
  const LatticeGrid& grid = state.grid;
  const size_t n = static_cast<size_t>(grid.sites());
  CarlemanState out(grid, state.storage);
  out.time = state.time + 1;

  for (size_t x = 0; x < n; ++x) {
    for (int i = 0; i < 9; ++i) {
      const size_t dst = static_cast<size_t>(
          grid.shifted(static_cast<int>(x), ch.velocity[i]));
      out.f[dst * 9 + i] = state.f[x * 9 + i];
    }
  }

  if (state.storage == PairStorage::kDense) {
    for (size_t x1 = 0; x1 < n; ++x1) {
      std::array<size_t, 9> dst1;
      for (int i = 0; i < 9; ++i) {
        dst1[i] = static_cast<size_t>(
            grid.shifted(static_cast<int>(x1), ch.velocity[i]));
      }
      for (size_t x2 = 0; x2 < n; ++x2) {
        const double* src = &state.g[(x1 * n + x2) * 81];
        for (int j = 0; j < 9; ++j) {
          const size_t d2 = static_cast<size_t>(
              grid.shifted(static_cast<int>(x2), ch.velocity[j]));
          for (int i = 0; i < 9; ++i) {
            out.g[((dst1[i] * n + d2) * 9 + i) * 9 + j] = src[m9(i, j)];
          }
        }
      }
    }
  } else {
    for (size_t x = 0; x < n; ++x) {
      for (int i = 0; i < 9; ++i) {
        const size_t dst = static_cast<size_t>(
            grid.shifted(static_cast<int>(x), ch.velocity[i]));
        out.f_lin[dst * 9 + i] = state.f_lin[x * 9 + i];
      }
    }
  }
  return out;
}

std::vector<CarlemanState> carleman_run(const DistributionField& f0, double tau,
                                        int steps, PairStorage storage) {
  if (steps < 0) {
    throw std::invalid_argument("carleman_run: steps must be >= 0");
  }
  const auto [eq, col] = build_tensors(d2q9(), tau);
  (void)eq;
  std::vector<CarlemanState> series;
  series.reserve(static_cast<size_t>(steps) + 1);
  series.push_back(carleman_init(f0, storage));
  for (int t = 0; t < steps; ++t) {
    series.push_back(carleman_stream(carleman_collision(series.back(), col)));
  }
  return series;
}

void write_matrix_csv(std::ostream& os, const Matrix9& m) {
  os << "i,j,value\n";
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      os << i << ',' << j << ',' << format_double(m[m9(i, j)]) << '\n';
    }
  }
}

void write_tensor_csv(std::ostream& os, const Tensor9& t) {
  os << "i,j,k,value\n";
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      for (int k = 0; k < 9; ++k) {
        os << i << ',' << j << ',' << k << ','
           << format_double(t[t9(i, j, k)]) << '\n';
      }
    }
  }
}

void write_matrix_csv(const std::string& path, const Matrix9& m) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("write_matrix_csv: cannot open " + path);
  }
  write_matrix_csv(os, m);
}

void write_tensor_csv(const std::string& path, const Tensor9& t) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("write_tensor_csv: cannot open " + path);
  }
  write_tensor_csv(os, t);
}

}  // namespace qlbm
