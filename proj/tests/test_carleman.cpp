#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qlbm/carleman.hpp"
#include "qlbm/channels.hpp"
#include "qlbm/field.hpp"
#include "qlbm/lattice.hpp"
#include "qlbm/lbm.hpp"

namespace {

using namespace qlbm;

/// Independent reconstruction of the equilibrium tensors straight from the
/// channel table, written out long-hand so it shares no code with the
/// library implementation.
struct TensorOracle {
  Matrix9 linear{};
  Tensor9 quadratic{};

  TensorOracle() {
    const auto& ch = d2q9();
    const double cs2 = ChannelSet::kCs2;
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        const double cij = ch.velocity[i].x * ch.velocity[j].x +
                           ch.velocity[i].y * ch.velocity[j].y;
        linear[m9(i, j)] = ch.weight[i] * (1.0 + cij / cs2);
        for (int k = 0; k < 9; ++k) {
          const double cik = ch.velocity[i].x * ch.velocity[k].x +
                             ch.velocity[i].y * ch.velocity[k].y;
          const double cjk = ch.velocity[j].x * ch.velocity[k].x +
                             ch.velocity[j].y * ch.velocity[k].y;
          quadratic[t9(i, j, k)] =
              ch.weight[i] / (cs2 * cs2) * (cij * cik - cs2 * cjk);
        }
      }
    }
  }
};

DistributionField random_positive_field(const LatticeGrid& grid,
                                        unsigned seed) {
  DistributionField field(grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.02, 0.2);
  for (size_t k = 0; k < field.values.size(); ++k) {
    field.values[k] = dist(rng);
  }
  return field;
}

double f_sector_mass(const CarlemanState& state) {
  double sum = 0.0;
  for (const double v : state.f) {
    sum += v;
  }
  return sum;
}

/// Swaps every channel with its opposite, in both the f and the dense g
/// sector; streaming conjugated by this map must invert itself.
CarlemanState reverse_channels(const CarlemanState& state) {
  const auto& ch = d2q9();
  CarlemanState out = state;
  const int n = state.grid.sites();
  for (int x = 0; x < n; ++x) {
    for (int i = 0; i < 9; ++i) {
      out.f[x * 9 + ch.opposite(i)] = state.f[x * 9 + i];
    }
  }
  for (int x1 = 0; x1 < n; ++x1) {
    for (int x2 = 0; x2 < n; ++x2) {
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          out.g[((static_cast<size_t>(x1) * n + x2) * 9 + ch.opposite(i)) * 9 +
                ch.opposite(j)] =
              state.g[((static_cast<size_t>(x1) * n + x2) * 9 + i) * 9 + j];
        }
      }
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE_MESSAGE(is.good(), "missing file: " << path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path golden_dir() {
  return std::filesystem::path(QLBM_SOURCE_DIR) / "tests" / "golden";
}

}  // namespace

TEST_CASE("equilibrium tensors: defining formulas and summation identities") {
  const TensorOracle oracle;
  const auto [eq, coll] = build_tensors(d2q9(), 5.0);

  SUBCASE("linear and quadratic tensors match the channel-table formulas") {
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        CHECK(eq.linear[m9(i, j)] ==
              doctest::Approx(oracle.linear[m9(i, j)]).epsilon(1e-15));
        for (int k = 0; k < 9; ++k) {
          CHECK(eq.quadratic[t9(i, j, k)] ==
                doctest::Approx(oracle.quadratic[t9(i, j, k)]).epsilon(1e-15));
        }
      }
    }
  }

  SUBCASE("columns of the linear tensor sum to one") {
    for (int j = 0; j < 9; ++j) {
      double col = 0.0;
      for (int i = 0; i < 9; ++i) {
        col += eq.linear[m9(i, j)];
      }
      CHECK(col == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  SUBCASE("quadratic tensor columns sum to zero") {
    for (int j = 0; j < 9; ++j) {
      for (int k = 0; k < 9; ++k) {
        double col = 0.0;
        for (int i = 0; i < 9; ++i) {
          col += eq.quadratic[t9(i, j, k)];
        }
        CHECK(std::abs(col) < 1e-14);
      }
    }
  }

  SUBCASE("cubic slice is exactly minus half the quadratic tensor") {
    for (int idx = 0; idx < 729; ++idx) {
      CHECK(eq.cubic_slice[idx] == -0.5 * eq.quadratic[idx]);
    }
  }

  SUBCASE("quadratic tensor is symmetric in its trailing indices") {
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        for (int k = 0; k < 9; ++k) {
          CHECK(eq.quadratic[t9(i, j, k)] == eq.quadratic[t9(i, k, j)]);
        }
      }
    }
  }

  SUBCASE("tensor polynomial reproduces the equilibrium at unit density") {
    // Oracle first: the closed-form equilibrium of the normalized field.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.02, 0.2);
    std::array<double, 9> f{};
    double rho = 0.0;
    for (double& v : f) {
      v = dist(rng);
      rho += v;
    }
    for (double& v : f) {
      v /= rho;  // unit density, where the polynomial identity is exact
    }
    const auto& ch = d2q9();
    Vec2d u{0.0, 0.0};
    for (int i = 0; i < 9; ++i) {
      u.x += f[i] * ch.velocity[i].x;
      u.y += f[i] * ch.velocity[i].y;
    }
    const std::array<double, 9> expected = equilibrium(1.0, u);

    for (int i = 0; i < 9; ++i) {
      double value = 0.0;
      for (int j = 0; j < 9; ++j) {
        value += eq.linear[m9(i, j)] * f[j];
        for (int k = 0; k < 9; ++k) {
          value += eq.quadratic[t9(i, j, k)] * f[j] * f[k];
          // cubic term: constant over the trailing index, so the sum over
          // that index contributes a factor of the density (= 1 here).
          value += eq.cubic_slice[t9(i, j, k)] * f[j] * f[k] * 1.0;
        }
      }
      CHECK(value == doctest::Approx(expected[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("collision tensors: relaxation combination of the equilibrium set") {
  SUBCASE("tau = 1 collapses the linear part onto the equilibrium tensor") {
    const auto [eq, coll] = build_tensors(d2q9(), 1.0);
    for (int idx = 0; idx < 81; ++idx) {
      CHECK(coll.a[idx] == doctest::Approx(eq.linear[idx]).epsilon(1e-15));
    }
  }

  SUBCASE("definitions hold entrywise at tau = 5") {
    const auto [eq, coll] = build_tensors(d2q9(), 5.0);
    const double omega = 1.0 / 5.0;
    CHECK(coll.omega == doctest::Approx(omega).epsilon(1e-15));
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        const double expected =
            (i == j ? 1.0 - omega : 0.0) + omega * eq.linear[m9(i, j)];
        CHECK(coll.a[m9(i, j)] == doctest::Approx(expected).epsilon(1e-15));
      }
    }
    for (int idx = 0; idx < 729; ++idx) {
      CHECK(coll.b[idx] == doctest::Approx(omega * eq.quadratic[idx]));
      CHECK(coll.c_slice[idx] ==
            doctest::Approx(-0.5 * omega * eq.quadratic[idx]));
    }
  }

  SUBCASE("column sums: a-columns are one, b-columns are zero, tau = 5") {
    const auto [eq, coll] = build_tensors(d2q9(), 5.0);
    for (int j = 0; j < 9; ++j) {
      double col = 0.0;
      for (int i = 0; i < 9; ++i) {
        col += coll.a[m9(i, j)];
      }
      CHECK(col == doctest::Approx(1.0).epsilon(1e-14));
      for (int k = 0; k < 9; ++k) {
        double bcol = 0.0;
        for (int i = 0; i < 9; ++i) {
          bcol += coll.b[t9(i, j, k)];
        }
        CHECK(std::abs(bcol) < 1e-14);
      }
    }
  }

  SUBCASE("infinite tau freezes the dynamics") {
    const auto [eq, coll] =
        build_tensors(d2q9(), std::numeric_limits<double>::infinity());
    CHECK(coll.omega == 0.0);
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        CHECK(coll.a[m9(i, j)] == (i == j ? 1.0 : 0.0));
      }
    }
    for (int idx = 0; idx < 729; ++idx) {
      CHECK(coll.b[idx] == 0.0);
    }
  }

  SUBCASE("non-positive tau is rejected") {
    CHECK_THROWS_AS(build_tensors(d2q9(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_tensors(d2q9(), -1.0), std::invalid_argument);
  }
}

TEST_CASE("carleman_collision: site-local second-order update") {
  const auto [eq, coll] = build_tensors(d2q9(), 5.0);
  const auto& ch = d2q9();

  SUBCASE("global equilibrium is a fixed point of both sectors") {
    const LatticeGrid grid(2, 2);
    DistributionField f0(grid);
    for (int x = 0; x < grid.sites(); ++x) {
      for (int i = 0; i < 9; ++i) {
        f0.at(x, i) = ch.weight[i];
      }
    }
    const CarlemanState state = carleman_init(f0);
    const CarlemanState next = carleman_collision(state, coll);
    for (size_t k = 0; k < state.f.size(); ++k) {
      CHECK(next.f[k] == doctest::Approx(state.f[k]).epsilon(1e-14));
    }
    for (size_t k = 0; k < state.g.size(); ++k) {
      CHECK(next.g[k] == doctest::Approx(state.g[k]).epsilon(1e-14));
    }
  }

  SUBCASE("zero pair sector leaves the pure linear relaxation") {
    const LatticeGrid grid(2, 2);
    const DistributionField f0 = random_positive_field(grid, 17);
    CarlemanState state = carleman_init(f0);
    std::fill(state.g.begin(), state.g.end(), 0.0);
    const CarlemanState next = carleman_collision(state, coll);
    for (int x = 0; x < grid.sites(); ++x) {
      for (int i = 0; i < 9; ++i) {
        double expected = 0.0;
        for (int j = 0; j < 9; ++j) {
          expected += coll.a[m9(i, j)] * state.f[x * 9 + j];
        }
        CHECK(next.f[x * 9 + i] == doctest::Approx(expected).epsilon(1e-14));
      }
    }
  }

  SUBCASE("single site matches a brute-force contraction oracle") {
    const LatticeGrid grid(1, 1);
    const DistributionField f0 = random_positive_field(grid, 29);
    const CarlemanState next = carleman_collision(carleman_init(f0), coll);
    const TensorOracle oracle;
    const double omega = coll.omega;
    for (int i = 0; i < 9; ++i) {
      // Quadratically truncated relaxation written out directly.
      double value = (1.0 - omega) * f0.values[i];
      for (int j = 0; j < 9; ++j) {
        value += omega * oracle.linear[m9(i, j)] * f0.values[j];
        for (int k = 0; k < 9; ++k) {
          value += omega * oracle.quadratic[t9(i, j, k)] * f0.values[j] *
                   f0.values[k];
        }
      }
      CHECK(next.f[i] == doctest::Approx(value).epsilon(1e-14));
    }
  }

  SUBCASE("pair sector evolves as the tensor square of the linear map") {
    const LatticeGrid grid(2, 2);
    const DistributionField f0 = random_positive_field(grid, 41);
    const CarlemanState state = carleman_init(f0);
    const CarlemanState next = carleman_collision(state, coll);
    const int n = grid.sites();
    // Oracle: relax f by the linear tensor alone, then form the outer
    // product; the pair update must factor exactly this way.
    std::vector<double> af(state.f.size(), 0.0);
    for (int x = 0; x < n; ++x) {
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          af[x * 9 + i] += coll.a[m9(i, j)] * state.f[x * 9 + j];
        }
      }
    }
    for (int x1 = 0; x1 < n; ++x1) {
      for (int x2 = 0; x2 < n; ++x2) {
        for (int i = 0; i < 9; ++i) {
          for (int j = 0; j < 9; ++j) {
            CHECK(next.g_at(x1, x2, i, j) ==
                  doctest::Approx(af[x1 * 9 + i] * af[x2 * 9 + j])
                      .epsilon(1e-13));
          }
        }
      }
    }
  }

  SUBCASE("f-sector mass is conserved on consistent states") {
    const LatticeGrid grid(4, 4);
    const DistributionField f0 = random_positive_field(grid, 53);
    const CarlemanState state = carleman_init(f0);
    const CarlemanState next = carleman_collision(state, coll);
    CHECK(f_sector_mass(next) ==
          doctest::Approx(f_sector_mass(state)).epsilon(1e-12));
  }
}

TEST_CASE("carleman_stream: independent advection of both legs") {
  const LatticeGrid grid(2, 4);
  const DistributionField f0 = random_positive_field(grid, 61);
  const CarlemanState state = carleman_init(f0);
  const CarlemanState streamed = carleman_stream(state);

  SUBCASE("rest-channel pairs stay in place") {
    for (int x1 = 0; x1 < grid.sites(); ++x1) {
      CHECK(streamed.f[x1 * 9] == state.f[x1 * 9]);
      for (int x2 = 0; x2 < grid.sites(); ++x2) {
        CHECK(streamed.g_at(x1, x2, 0, 0) == state.g_at(x1, x2, 0, 0));
      }
    }
  }

  SUBCASE("each pair value lands at the per-leg shifted sites") {
    const auto& ch = d2q9();
    for (int x1 = 0; x1 < grid.sites(); ++x1) {
      for (int x2 = 0; x2 < grid.sites(); ++x2) {
        for (int i = 0; i < 9; ++i) {
          for (int j = 0; j < 9; ++j) {
            const int d1 = grid.shifted(x1, ch.velocity[i]);
            const int d2 = grid.shifted(x2, ch.velocity[j]);
            CHECK(streamed.g_at(d1, d2, i, j) == state.g_at(x1, x2, i, j));
          }
        }
      }
    }
  }

  SUBCASE("streaming conjugated by channel reversal is an involution") {
    const CarlemanState back =
        reverse_channels(carleman_stream(reverse_channels(streamed)));
    CHECK(back.f == state.f);
    CHECK(back.g == state.g);
  }

  SUBCASE("multiset of pair values is preserved") {
    std::vector<double> before = state.g;
    std::vector<double> after = streamed.g;
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    CHECK(before == after);
  }
}

TEST_CASE("carleman_run: time series of the truncated system") {
  SUBCASE("zero steps echoes the initial state") {
    const LatticeGrid grid(2, 2);
    const DistributionField f0 = random_positive_field(grid, 71);
    const auto series = carleman_run(f0, 5.0, 0);
    REQUIRE(series.size() == 1);
    CHECK(series[0].f == carleman_init(f0).f);
    CHECK(series[0].g == carleman_init(f0).g);
    CHECK(series[0].time == 0);
  }

  SUBCASE("one step is collision followed by streaming") {
    const LatticeGrid grid(2, 2);
    const DistributionField f0 = random_positive_field(grid, 73);
    const auto [eq, coll] = build_tensors(d2q9(), 5.0);
    const auto series = carleman_run(f0, 5.0, 1);
    REQUIRE(series.size() == 2);
    const CarlemanState expected =
        carleman_stream(carleman_collision(carleman_init(f0), coll));
    CHECK(series[1].f == expected.f);
    CHECK(series[1].g == expected.g);
    CHECK(series[1].time == 1);
  }

  SUBCASE("implicit pair storage reproduces the dense evolution") {
    const LatticeGrid grid(2, 2);
    const DistributionField f0 = random_positive_field(grid, 79);
    const auto dense = carleman_run(f0, 5.0, 3, PairStorage::kDense);
    const auto implicit = carleman_run(f0, 5.0, 3, PairStorage::kImplicit);
    REQUIRE(dense.size() == implicit.size());
    for (size_t t = 0; t < dense.size(); ++t) {
      // The pair sector feeds back into f, so the two storage modes may
      // differ in the last few ulps once the evolved g values are formed
      // along different arithmetic paths.
      REQUIRE(dense[t].f.size() == implicit[t].f.size());
      for (size_t k = 0; k < dense[t].f.size(); ++k) {
        CHECK(dense[t].f[k] ==
              doctest::Approx(implicit[t].f[k]).epsilon(1e-13));
      }
      for (int x1 = 0; x1 < grid.sites(); ++x1) {
        for (int x2 = 0; x2 < grid.sites(); ++x2) {
          for (int i = 0; i < 9; ++i) {
            for (int j = 0; j < 9; ++j) {
              CHECK(dense[t].g_at(x1, x2, i, j) ==
                    doctest::Approx(implicit[t].g_at(x1, x2, i, j))
                        .epsilon(1e-13));
            }
          }
        }
      }
    }
  }

  SUBCASE("vortex run at production scale stays finite and conservative") {
    const LatticeGrid grid(32, 32);
    const DistributionField f0 =
        taylor_green_init(grid, 0.15, TgvWavenumber::kFullPeriod);
    const auto series = carleman_run(f0, 5.0, 10, PairStorage::kImplicit);
    REQUIRE(series.size() == 11);
    const double mass0 = f_sector_mass(series.front());
    for (const auto& state : series) {
      for (const double v : state.f) {
        CHECK(std::isfinite(v));
      }
      CHECK(f_sector_mass(state) == doctest::Approx(mass0).epsilon(1e-12));
    }
  }
}

TEST_CASE("single-step distance from the untruncated update is bounded by "
          "the dropped cubic term") {
  // On a unit-density field the quadratic truncation differs from the full
  // relaxation by exactly the cubic tensor contribution; bound it a priori
  // and check the realized gap entry by entry.
  const LatticeGrid grid(8, 8);
  const double tau = 5.0;
  const DistributionField f0 =
      taylor_green_init(grid, 0.15, TgvWavenumber::kFullPeriod);
  const auto [eq, coll] = build_tensors(d2q9(), tau);

  const DistributionField lbm_next = bgk_step(f0, tau);
  const auto series = carleman_run(f0, tau, 1, PairStorage::kImplicit);
  const DistributionField carleman_next = series.back().f_field();

  double max_f = 0.0;
  for (const double v : f0.values) {
    max_f = std::max(max_f, std::abs(v));
  }
  for (int i = 0; i < 9; ++i) {
    double c_row = 0.0;
    for (int j = 0; j < 9; ++j) {
      for (int k = 0; k < 9; ++k) {
        c_row += std::abs(coll.c_slice[t9(i, j, k)]);
      }
    }
    const double bound = c_row * max_f * max_f * max_f * 9.0;
    for (int x = 0; x < grid.sites(); ++x) {
      CHECK(std::abs(carleman_next.values[x * 9 + i] -
                     lbm_next.values[x * 9 + i]) <= bound);
    }
  }
}

TEST_CASE("tensor CSV dumps: format and golden regression") {
  const auto [eq, coll] = build_tensors(d2q9(), 5.0);

  SUBCASE("matrix dump schema") {
    std::ostringstream ss;
    write_matrix_csv(ss, eq.linear);
    std::istringstream is(ss.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "i,j,value");
    int rows = 0;
    while (std::getline(is, line)) {
      ++rows;
    }
    CHECK(rows == 81);
  }

  SUBCASE("tensor dump schema") {
    std::ostringstream ss;
    write_tensor_csv(ss, eq.quadratic);
    std::istringstream is(ss.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "i,j,k,value");
    int rows = 0;
    while (std::getline(is, line)) {
      ++rows;
    }
    CHECK(rows == 729);
  }

  SUBCASE("dumps match the frozen golden files") {
    const struct {
      const char* file;
      std::string current;
    } cases[] = {
        {"equilibrium_linear.csv",
         [&] {
           std::ostringstream ss;
           write_matrix_csv(ss, eq.linear);
           return ss.str();
         }()},
        {"equilibrium_quadratic.csv",
         [&] {
           std::ostringstream ss;
           write_tensor_csv(ss, eq.quadratic);
           return ss.str();
         }()},
        {"collision_linear_tau5.csv",
         [&] {
           std::ostringstream ss;
           write_matrix_csv(ss, coll.a);
           return ss.str();
         }()},
        {"collision_quadratic_tau5.csv",
         [&] {
           std::ostringstream ss;
           write_tensor_csv(ss, coll.b);
           return ss.str();
         }()},
    };
    for (const auto& c : cases) {
      CAPTURE(c.file);
      CHECK(c.current == read_text_file(golden_dir() / c.file));
    }
  }
}
