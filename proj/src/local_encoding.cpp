#include "qlbm/local_encoding.hpp"

#include <fstream>
#include <stdexcept>

#include "qlbm/channels.hpp"

namespace qlbm {

int relative_site(const LatticeGrid& grid, int x1, int x2) {
  const Vec2i a = grid.coords(x1);
  const Vec2i b = grid.coords(x2);
  return grid.index(grid.wrap_x(b.x - a.x), grid.wrap_y(b.y - a.y));
}

int absolute_site(const LatticeGrid& grid, int x1, int rel) {
  const Vec2i a = grid.coords(x1);
  const Vec2i r = grid.coords(rel);
  return grid.index(grid.wrap_x(a.x + r.x), grid.wrap_y(a.y + r.y));
}

namespace {

size_t pair_block(const LatticeGrid& grid, int p1, int p2) {
  return (static_cast<size_t>(p1) * grid.sites() + p2) * 81;
}

void check_pair_size(const LatticeGrid& grid, const std::vector<double>& g,
                     const char* who) {
  const size_t n = static_cast<size_t>(grid.sites());
  if (g.size() != n * n * 81) {
    throw std::invalid_argument(std::string(who) +
                                ": pair array size does not match grid");
  }
}

}  // namespace

std::vector<double> encode_pair_field(const LatticeGrid& grid,
                                      const std::vector<double>& g_natural) {
  check_pair_size(grid, g_natural, "encode_pair_field");
  std::vector<double> out(g_natural.size());
  for (int x1 = 0; x1 < grid.sites(); ++x1) {
    for (int x2 = 0; x2 < grid.sites(); ++x2) {
      const int rel = relative_site(grid, x1, x2);
      const double* src = &g_natural[pair_block(grid, x1, x2)];
      double* dst = &out[pair_block(grid, x1, rel)];
      for (int k = 0; k < 81; ++k) {
        dst[k] = src[k];
      }
    }
  }
  return out;
}

std::vector<double> decode_pair_field(const LatticeGrid& grid,
                                      const std::vector<double>& g_encoded) {
  check_pair_size(grid, g_encoded, "decode_pair_field");
  std::vector<double> out(g_encoded.size());
  for (int x1 = 0; x1 < grid.sites(); ++x1) {
    for (int rel = 0; rel < grid.sites(); ++rel) {
      const int x2 = absolute_site(grid, x1, rel);
      const double* src = &g_encoded[pair_block(grid, x1, rel)];
      double* dst = &out[pair_block(grid, x1, x2)];
      for (int k = 0; k < 81; ++k) {
        dst[k] = src[k];
      }
    }
  }
  return out;
}

PairShift shift_vectors(int i, int j) {
  const ChannelSet& ch = d2q9();
  if (i < 0 || i >= ChannelSet::kCount || j < 0 || j >= ChannelSet::kCount) {
    throw std::invalid_argument("shift_vectors: channel out of range");
  }
  return {ch.velocity[i], ch.velocity[j] - ch.velocity[i]};
}

std::vector<PermutationStep> permutation_plan(const LatticeGrid& grid) {
  std::vector<PermutationStep> plan;
  for (int k = 0; k < grid.x_bits(); ++k) {
    plan.push_back({0, k, -(1 << k)});
  }
  for (int k = 0; k < grid.y_bits(); ++k) {
    plan.push_back({1, k, -(1 << k)});
  }
  return plan;
}

std::vector<PermutationStep> inverse_permutation_plan(const LatticeGrid& grid) {
  std::vector<PermutationStep> plan = permutation_plan(grid);
  for (PermutationStep& s : plan) {
    s.amount = -s.amount;
  }
  return plan;
}

std::vector<double> apply_permutation_step(const LatticeGrid& grid,
                                           const std::vector<double>& sector,
                                           const PermutationStep& step) {
  check_pair_size(grid, sector, "apply_permutation_step");
  std::vector<double> out(sector.size());
  for (int p1 = 0; p1 < grid.sites(); ++p1) {
    const Vec2i c1 = grid.coords(p1);
    const int coord1 = (step.dim == 0) ? c1.x : c1.y;
    const bool active = ((coord1 >> step.bit) & 1) != 0;
    for (int p2 = 0; p2 < grid.sites(); ++p2) {
      int dst = p2;
      if (active) {
        Vec2i c2 = grid.coords(p2);
        if (step.dim == 0) {
          c2.x = grid.wrap_x(c2.x + step.amount);
        } else {
          c2.y = grid.wrap_y(c2.y + step.amount);
        }
        dst = grid.index(c2.x, c2.y);
      }
      const double* src = &sector[pair_block(grid, p1, p2)];
      double* d = &out[pair_block(grid, p1, dst)];
      for (int k = 0; k < 81; ++k) {
        d[k] = src[k];
      }
    }
  }
  return out;
}

std::vector<double> apply_permutation_plan(
    const LatticeGrid& grid, std::vector<double> sector,
    const std::vector<PermutationStep>& plan) {
  for (const PermutationStep& step : plan) {
    sector = apply_permutation_step(grid, sector, step);
  }
  return sector;
}

void write_plan(std::ostream& os, const std::vector<PermutationStep>& plan) {
  for (const PermutationStep& s : plan) {
    os << (s.dim == 0 ? 'x' : 'y') << ' ' << s.bit << ' ' << s.amount << '\n';
  }
}

void write_plan(const std::string& path,
                const std::vector<PermutationStep>& plan) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("write_plan: cannot open " + path);
  }
  write_plan(os, plan);
}

EncodedCarlemanState::EncodedCarlemanState(const LatticeGrid& grid_)
    : grid(grid_) {
  const size_t n = static_cast<size_t>(grid.sites());
  f.assign(n * 9, 0.0);
  g_rel.assign(n * n * 81, 0.0);
}

EncodedCarlemanState encoded_init(const DistributionField& f0) {
  return to_encoded(carleman_init(f0, PairStorage::kDense));
}

EncodedCarlemanState to_encoded(const CarlemanState& state) {
  if (state.storage != PairStorage::kDense) {
    throw std::invalid_argument("to_encoded: requires dense pair storage");
  }
  EncodedCarlemanState out(state.grid);
  out.time = state.time;
  out.f = state.f;
  out.g_rel = encode_pair_field(state.grid, state.g);
  return out;
}

CarlemanState to_natural(const EncodedCarlemanState& state) {
  CarlemanState out(state.grid, PairStorage::kDense);
  out.time = state.time;
  out.f = state.f;
  out.g = decode_pair_field(state.grid, state.g_rel);
  return out;
}

EncodedCarlemanState encoded_collision(const EncodedCarlemanState& state,
                                       const CollisionTensors& tensors) {
  const LatticeGrid& grid = state.grid;
  const size_t n = static_cast<size_t>(grid.sites());
  EncodedCarlemanState out(grid);
  out.time = state.time;

  for (size_t x = 0; x < n; ++x) {
    // Linear relaxation plus quadratic feedback from the rel = 0 diagonal.
    const double* diag = &state.g_rel[(x * n + 0) * 81];
    for (int i = 0; i < 9; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 9; ++j) {
        acc += tensors.a[m9(i, j)] * state.f[x * 9 + j];
      }
      for (int j = 0; j < 9; ++j) {
        for (int k = 0; k < 9; ++k) {
          acc += tensors.b[t9(i, j, k)] * diag[m9(j, k)];
        }
      }
      out.f[x * 9 + i] = acc;
    }
    // Pair blocks transform identically at every relative offset.
    for (size_t rel = 0; rel < n; ++rel) {
      const double* gin = &state.g_rel[(x * n + rel) * 81];
      double* gout = &out.g_rel[(x * n + rel) * 81];
      double tmp[81];
      for (int i = 0; i < 9; ++i) {
        for (int l = 0; l < 9; ++l) {
          double acc = 0.0;
          for (int k = 0; k < 9; ++k) {
            acc += tensors.a[m9(i, k)] * gin[m9(k, l)];
          }
          tmp[m9(i, l)] = acc;
        }
      }
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          double acc = 0.0;
          for (int l = 0; l < 9; ++l) {
            acc += tmp[m9(i, l)] * tensors.a[m9(j, l)];
          }
          gout[m9(i, j)] = acc;
        }
      }
    }
  }
  return out;
}

EncodedCarlemanState encoded_stream(const EncodedCarlemanState& state) {
  const ChannelSet& ch = d2q9();
  const LatticeGrid& grid = state.grid;
  const size_t n = static_cast<size_t>(grid.sites());
  EncodedCarlemanState out(grid);
  out.time = state.time + 1;

  for (size_t x = 0; x < n; ++x) {
    for (int i = 0; i < 9; ++i) {
      const size_t dst = static_cast<size_t>(
          grid.shifted(static_cast<int>(x), ch.velocity[i]));
      out.f[dst * 9 + i] = state.f[x * 9 + i];
    }
  }

  for (size_t x1 = 0; x1 < n; ++x1) {
    for (size_t rel = 0; rel < n; ++rel) {
      const double* src = &state.g_rel[(x1 * n + rel) * 81];
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          const PairShift sh = shift_vectors(i, j);
          const size_t d1 = static_cast<size_t>(
              grid.shifted(static_cast<int>(x1), sh.du_p1));
          const size_t d2 = static_cast<size_t>(
              grid.shifted(static_cast<int>(rel), sh.du_p2));
          out.g_rel[((d1 * n + d2) * 9 + i) * 9 + j] = src[m9(i, j)];
        }
      }
    }
  }
  return out;
}

}  // namespace qlbm
