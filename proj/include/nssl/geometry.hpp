/// @file geometry.hpp
/// @brief Grid geometry, balls, and parabolic cylinders on a sampled box.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "nssl/errors.hpp"

namespace nssl {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double norm_sq() const { return x * x + y * y + z * z; }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

/// Axis-aligned spatial bounds of the sampled box.
struct Box {
  Vec3 lo, hi;

  double length(int axis) const {
    switch (axis) {
      case 0: return hi.x - lo.x;
      case 1: return hi.y - lo.y;
      default: return hi.z - lo.z;
    }
  }
  double lo_axis(int axis) const {
    return axis == 0 ? lo.x : axis == 1 ? lo.y : lo.z;
  }
  double hi_axis(int axis) const {
    return axis == 0 ? hi.x : axis == 1 ? hi.y : hi.z;
  }
};

/// Node layout of one spatial lattice.
///
/// Periodic axes place n nodes at lo + i*h with h = L/n (the wrap image of
/// node 0 is not duplicated); non-periodic axes include both endpoints with
/// h = L/(n-1). Each node owns the cell [x_i - h/2, x_i + h/2], clipped to
/// the box on non-periodic axes, so cells tile the box exactly.
struct GridGeometry {
  int nx = 0, ny = 0, nz = 0;
  Box box;
  std::array<bool, 3> periodic{false, false, false};

  int dim(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }

  double spacing(int axis) const {
    const int n = dim(axis);
    const double len = box.length(axis);
    return periodic[static_cast<std::size_t>(axis)] ? len / n : len / (n - 1);
  }
  double hx() const { return spacing(0); }
  double hy() const { return spacing(1); }
  double hz() const { return spacing(2); }
  double max_spacing() const { return std::fmax(hx(), std::fmax(hy(), hz())); }
  double cell_volume() const { return hx() * hy() * hz(); }

  double node_coord(int axis, int i) const {
    return box.lo_axis(axis) + spacing(axis) * i;
  }
  Vec3 node(int ix, int iy, int iz) const {
    return {node_coord(0, ix), node_coord(1, iy), node_coord(2, iz)};
  }

  std::size_t node_count() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
  /// Linear index, x fastest, z slowest.
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(iz) * ny + iy) * nx + ix;
  }

  /// Extent of the cell owned by node i along one axis (clipped to the box
  /// on non-periodic axes, where end nodes own half cells).
  void cell_bounds(int axis, int i, double* lo, double* hi) const {
    const double h = spacing(axis);
    const double c = node_coord(axis, i);
    *lo = c - 0.5 * h;
    *hi = c + 0.5 * h;
    if (!periodic[static_cast<std::size_t>(axis)]) {
      if (*lo < box.lo_axis(axis)) *lo = box.lo_axis(axis);
      if (*hi > box.hi_axis(axis)) *hi = box.hi_axis(axis);
    }
  }

  void validate() const {
    if (nx < 1 || ny < 1 || nz < 1)
      throw ParameterError("grid dims must be positive");
    for (int a = 0; a < 3; ++a) {
      if (!(box.length(a) > 0.0))
        throw ParameterError("box must have positive extent on every axis");
      if (!periodic[static_cast<std::size_t>(a)] && dim(a) < 2)
        throw ParameterError("non-periodic axes need at least 2 nodes");
    }
  }
};

/// Spatial ball B_r(center). Radius must be positive; queries are geometric
/// in box coordinates (no wrap across periodic images).
struct BallSpec {
  Vec3 center;
  double radius = 0.0;

  void validate() const {
    if (!(radius > 0.0)) throw ParameterError("ball radius must be positive");
  }
};

/// Parabolic cylinder Q_r(z0) = B_r(x0) x (t0 - r^2, t0].
struct CylinderSpec {
  double t0 = 0.0;
  Vec3 center;
  double radius = 0.0;

  double t_begin() const { return t0 - radius * radius; }
  BallSpec ball() const { return BallSpec{center, radius}; }

  void validate() const {
    if (!(radius > 0.0))
      throw ParameterError("cylinder radius must be positive");
  }
};

}  // namespace nssl
