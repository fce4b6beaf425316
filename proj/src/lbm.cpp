#include "qlbm/lbm.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "qlbm/channels.hpp"

namespace qlbm {

void site_macroscopics(const DistributionField& f, int site, double& rho,
                       Vec2d& u) {
  const ChannelSet& ch = d2q9();
  rho = 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (int i = 0; i < ChannelSet::kCount; ++i) {
    const double fi = f.at(site, i);
    rho += fi;
    mx += fi * ch.velocity[i].x;
    my += fi * ch.velocity[i].y;
  }
  if (rho == 0.0) {
    throw std::domain_error("site_macroscopics: zero density at site " +
                            std::to_string(site));
  }
  u = {mx / rho, my / rho};
}

Macroscopics macroscopics(const DistributionField& f) {
  Macroscopics out;
  const int n = f.grid.sites();
  out.rho.resize(n);
  out.u.resize(n);
  for (int s = 0; s < n; ++s) {
    site_macroscopics(f, s, out.rho[s], out.u[s]);
  }
  return out;
}

std::array<double, 9> equilibrium(double rho, Vec2d u) {
  const ChannelSet& ch = d2q9();
  const double cs2 = ChannelSet::kCs2;
  const double uu = u.x * u.x + u.y * u.y;
  std::array<double, 9> feq{};
  for (int i = 0; i < ChannelSet::kCount; ++i) {
    const double cu = u.x * ch.velocity[i].x + u.y * ch.velocity[i].y;
    feq[i] = ch.weight[i] * rho *
             (1.0 + cu / cs2 + (cu * cu) / (2.0 * cs2 * cs2) - uu / (2.0 * cs2));
  }
  return feq;
}

DistributionField bgk_step(const DistributionField& f, double tau) {
  const ChannelSet& ch = d2q9();
  const LatticeGrid& grid = f.grid;
  const bool collide = std::isfinite(tau);
  if (collide && tau <= 0.0) {
    throw std::invalid_argument("bgk_step: tau must be positive");
  }
  const double omega = collide ? 1.0 / tau : 0.0;

  DistributionField out(grid);
  out.time = f.time + 1;
  for (int s = 0; s < grid.sites(); ++s) {
    double rho;
    Vec2d u;
    std::array<double, 9> post;
    if (collide) {
      site_macroscopics(f, s, rho, u);
      const std::array<double, 9> feq = equilibrium(rho, u);
      for (int i = 0; i < ChannelSet::kCount; ++i) {
        post[i] = f.at(s, i) + omega * (feq[i] - f.at(s, i));
      }
    } else {
      for (int i = 0; i < ChannelSet::kCount; ++i) {
        post[i] = f.at(s, i);
      }
    }
    for (int i = 0; i < ChannelSet::kCount; ++i) {
      const int dst = grid.shifted(s, ch.velocity[i]);
      out.at(dst, i) = post[i];
    }
  }
  return out;
}

DistributionField taylor_green_init(const LatticeGrid& grid, double u_max,
                                    TgvWavenumber mode) {
  const double pi = std::acos(-1.0);
  const double factor = (mode == TgvWavenumber::kFullPeriod) ? 2.0 : 1.0;
  const double kx = factor * pi / grid.lx();
  const double ky = factor * pi / grid.ly();

  DistributionField f(grid);
  for (int s = 0; s < grid.sites(); ++s) {
    const Vec2i xy = grid.coords(s);
    const Vec2d u = {u_max * std::cos(kx * xy.x) * std::sin(ky * xy.y),
                     -u_max * std::sin(kx * xy.x) * std::cos(ky * xy.y)};
    const std::array<double, 9> feq = equilibrium(1.0, u);
    for (int i = 0; i < ChannelSet::kCount; ++i) {
      f.at(s, i) = feq[i];
    }
  }
  return f;
}

DistributionField random_init(const LatticeGrid& grid, std::uint64_t seed,
                              double amplitude) {
  if (amplitude < 0.0 || amplitude >= 1.0) {
    throw std::invalid_argument(
        "random_init: amplitude must lie in [0, 1) to keep f positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const ChannelSet& ch = d2q9();

  DistributionField f(grid);
  for (int s = 0; s < grid.sites(); ++s) {
    for (int i = 0; i < ChannelSet::kCount; ++i) {
      f.at(s, i) = ch.weight[i] * (1.0 + amplitude * dist(rng));
    }
  }
  return f;
}

}  // namespace qlbm
