#pragma once

#include <stdexcept>

namespace qlbm {

/// Integer 2-vector for channel velocities and lattice offsets.
struct Vec2i {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(const Vec2i&, const Vec2i&) = default;
  friend constexpr Vec2i operator+(Vec2i a, Vec2i b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2i operator-(Vec2i a, Vec2i b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2i operator-(Vec2i a) { return {-a.x, -a.y}; }
};

/// Real 2-vector for velocities.
struct Vec2d {
  double x = 0.0;
  double y = 0.0;
};

/// Periodic 2D lattice with power-of-two extents.
///
/// Sites are stored row-major with the y coordinate minor:
/// index(x, y) = x*ly + y. All neighbour arithmetic wraps modularly.
class LatticeGrid {
 public:
  LatticeGrid(int lx, int ly);

  int lx() const { return lx_; }
  int ly() const { return ly_; }
  int sites() const { return lx_ * ly_; }

  /// Number of address bits per dimension (extents are powers of two).
  int x_bits() const { return x_bits_; }
  int y_bits() const { return y_bits_; }
  int site_bits() const { return x_bits_ + y_bits_; }

  int index(int x, int y) const { return x * ly_ + y; }
  Vec2i coords(int site) const { return {site / ly_, site % ly_}; }

  int wrap_x(int x) const { return ((x % lx_) + lx_) % lx_; }
  int wrap_y(int y) const { return ((y % ly_) + ly_) % ly_; }

  /// Periodic neighbour of `site` displaced by `d`.
  int shifted(int site, Vec2i d) const {
    const Vec2i c = coords(site);
    return index(wrap_x(c.x + d.x), wrap_y(c.y + d.y));
  }

  friend bool operator==(const LatticeGrid&, const LatticeGrid&) = default;

 private:
  int lx_;
  int ly_;
  int x_bits_;
  int y_bits_;
};

}  // namespace qlbm
