/// @file helpers.hpp
/// @brief Shared grid and field builders for the test suites.
#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "nssl/field.hpp"
#include "nssl/synth.hpp"

namespace nssl::testing {

inline GridGeometry cube_grid(int n, double lo, double hi, bool periodic) {
  GridGeometry g;
  g.nx = g.ny = g.nz = n;
  g.box.lo = {lo, lo, lo};
  g.box.hi = {hi, hi, hi};
  g.periodic = {periodic, periodic, periodic};
  return g;
}

/// Field with u = f(t, x) (and optionally P = g(t, x)) sampled on the grid.
inline SampledField analytic_field(
    const GridGeometry& geom, double t_begin, double t_end, int nt,
    const std::function<Vec3(double, Vec3)>& velocity,
    const std::function<double(double, Vec3)>& pressure = nullptr) {
  SampledField field(geom, t_begin, t_end, nt, pressure != nullptr);
  for (int k = 0; k < nt; ++k) {
    const double t = field.time(k);
    for (int iz = 0; iz < geom.nz; ++iz) {
      for (int iy = 0; iy < geom.ny; ++iy) {
        for (int ix = 0; ix < geom.nx; ++ix) {
          const std::size_t n = geom.index(ix, iy, iz);
          const Vec3 x = geom.node(ix, iy, iz);
          const Vec3 u = velocity(t, x);
          field.u(0, k, n) = u.x;
          field.u(1, k, n) = u.y;
          field.u(2, k, n) = u.z;
          if (pressure) field.p(k, n) = pressure(t, x);
        }
      }
    }
  }
  return field;
}

/// Uniform [-1, 1] scalar lattice, deterministic per seed.
inline ScalarSlice random_slice(const GridGeometry& geom, std::uint64_t seed) {
  ScalarSlice slice;
  slice.geom = geom;
  slice.values.resize(geom.node_count());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (double& v : slice.values) v = uni(rng);
  return slice;
}

/// Static velocity field with independent uniform [-1, 1] components.
inline SampledField random_field(const GridGeometry& geom, std::uint64_t seed,
                                 int nt = 2, bool with_pressure = false) {
  SampledField field(geom, 0.0, 1.0, nt, with_pressure);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const std::size_t nnode = geom.node_count();
  for (std::size_t n = 0; n < nnode; ++n) {
    const double u0 = uni(rng), u1 = uni(rng), u2 = uni(rng);
    const double p0 = with_pressure ? uni(rng) : 0.0;
    for (int k = 0; k < nt; ++k) {
      field.u(0, k, n) = u0;
      field.u(1, k, n) = u1;
      field.u(2, k, n) = u2;
      if (with_pressure) field.p(k, n) = p0;
    }
  }
  return field;
}

inline GeneratorSpec beltrami_spec(int n, int nt, double t_end,
                                   double amplitude = 1.0) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::BeltramiAbc;
  spec.grid = cube_grid(n, 0.0, 2.0 * 3.14159265358979323846, true);
  spec.t_begin = 0.0;
  spec.t_end = t_end;
  spec.nt = nt;
  spec.abc_a = spec.abc_b = spec.abc_c = amplitude;
  return spec;
}

inline GeneratorSpec radial_spec(int n, double c = 1.0) {
  const double pi = 3.14159265358979323846;
  GeneratorSpec spec;
  spec.kind = GeneratorKind::InverseRadial;
  spec.grid = cube_grid(n, 0.0, 2.0 * pi, false);
  spec.t_begin = 0.0;
  spec.t_end = 1.0;
  spec.nt = 2;
  spec.center = {pi, pi, pi};
  spec.radial_c = c;
  return spec;
}

inline GeneratorSpec random_divfree_spec(int n, std::uint64_t seed,
                                         int nt = 2) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::RandomDivFree;
  spec.grid = cube_grid(n, 0.0, 2.0 * 3.14159265358979323846, true);
  spec.t_begin = 0.0;
  spec.t_end = 1.0;
  spec.nt = nt;
  spec.seed = seed;
  return spec;
}

}  // namespace nssl::testing
