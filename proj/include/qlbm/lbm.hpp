#pragma once

#include <array>
#include <cstdint>

#include "qlbm/field.hpp"

namespace qlbm {

/// Density and velocity of one site: rho = sum_i f_i, u = sum_i f_i c_i / rho.
/// Throws std::domain_error on a zero-density site (division guard).
void site_macroscopics(const DistributionField& f, int site, double& rho, Vec2d& u);

/// Macroscopic moments of every site.
Macroscopics macroscopics(const DistributionField& f);

/// Second-order equilibrium distribution:
/// f_i^eq = w_i rho (1 + (u.c_i)/cs2 + (u.c_i)^2/(2 cs2^2) - (u.u)/(2 cs2)).
/// Valid in the weakly compressible regime |u| <~ 0.3 lattice units.
std::array<double, 9> equilibrium(double rho, Vec2d u);

/// One BGK step: per-site relaxation f_i += (1/tau)(f_i^eq - f_i) followed by
/// periodic streaming to x + c_i. tau = +infinity skips the collision
/// (omega = 0, pure streaming). Increments the time counter.
DistributionField bgk_step(const DistributionField& f, double tau);

/// Wave-vector choice for the Taylor-Green initial condition.
enum class TgvWavenumber {
  kFullPeriod,  // k = 2*pi/L per dimension (one full period across the box)
  kHalfPeriod,  // k = pi/L per dimension (half period; nonzero on 2-site boxes)
};

/// Taylor-Green vortex at equilibrium: rho = 1,
/// u_x = u_max cos(kx x) sin(ky y), u_y = -u_max sin(kx x) cos(ky y).
DistributionField taylor_green_init(const LatticeGrid& grid, double u_max,
                                    TgvWavenumber mode);

/// Reproducible positive perturbation of the global equilibrium:
/// f_i(x) = w_i (1 + amplitude * xi) with xi uniform in [-1, 1].
DistributionField random_init(const LatticeGrid& grid, std::uint64_t seed,
                              double amplitude);

}  // namespace qlbm
