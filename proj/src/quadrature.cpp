#include "nssl/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "nssl/errors.hpp"

namespace nssl {

namespace {

constexpr int kSupersample = 4;  // boundary cells sampled at 4^3 sub-centers

// Index range of cells whose extent can touch [c - r, c + r] on one axis.
void axis_range(const GridGeometry& g, int axis, double c, double r, int* i0,
                int* i1) {
  const double h = g.spacing(axis);
  const double lo = g.box.lo_axis(axis);
  // Node i owns [lo + (i - 1/2) h, lo + (i + 1/2) h].
  double a = (c - r - lo) / h + 0.5;
  double b = (c + r - lo) / h - 0.5;
  *i0 = std::max(0, static_cast<int>(std::floor(a)) - 1);
  *i1 = std::min(g.dim(axis) - 1, static_cast<int>(std::ceil(b)) + 1);
}

}  // namespace

BallQuadrature::BallQuadrature(const GridGeometry& geom, const BallSpec& ball) {
  ball.validate();
  geom.validate();
  const double r2 = ball.radius * ball.radius;
  int ix0, ix1, iy0, iy1, iz0, iz1;
  axis_range(geom, 0, ball.center.x, ball.radius, &ix0, &ix1);
  axis_range(geom, 1, ball.center.y, ball.radius, &iy0, &iy1);
  axis_range(geom, 2, ball.center.z, ball.radius, &iz0, &iz1);

  for (int iz = iz0; iz <= iz1; ++iz) {
    double zl, zh;
    geom.cell_bounds(2, iz, &zl, &zh);
    for (int iy = iy0; iy <= iy1; ++iy) {
      double yl, yh;
      geom.cell_bounds(1, iy, &yl, &yh);
      for (int ix = ix0; ix <= ix1; ++ix) {
        double xl, xh;
        geom.cell_bounds(0, ix, &xl, &xh);

        auto axis_d2 = [](double c, double lo, double hi, double* dmin,
                          double* dmax) {
          const double near = std::clamp(c, lo, hi) - c;
          const double far = std::fmax(std::fabs(lo - c), std::fabs(hi - c));
          *dmin = near * near;
          *dmax = far * far;
        };
        double mnx, mxx, mny, mxy, mnz, mxz;
        axis_d2(ball.center.x, xl, xh, &mnx, &mxx);
        axis_d2(ball.center.y, yl, yh, &mny, &mxy);
        axis_d2(ball.center.z, zl, zh, &mnz, &mxz);
        const double d2min = mnx + mny + mnz;
        if (d2min >= r2) continue;
        const double vol = (xh - xl) * (yh - yl) * (zh - zl);
        if (!(vol > 0.0)) continue;

        double w;
        if (mxx + mxy + mxz <= r2) {
          w = vol;
        } else {
          int inside = 0;
          const double sx = (xh - xl) / kSupersample;
          const double sy = (yh - yl) / kSupersample;
          const double sz = (zh - zl) / kSupersample;
          for (int a = 0; a < kSupersample; ++a) {
            const double dx = xl + (a + 0.5) * sx - ball.center.x;
            for (int b = 0; b < kSupersample; ++b) {
              const double dy = yl + (b + 0.5) * sy - ball.center.y;
              for (int c = 0; c < kSupersample; ++c) {
                const double dz = zl + (c + 0.5) * sz - ball.center.z;
                if (dx * dx + dy * dy + dz * dz < r2) ++inside;
              }
            }
          }
          if (inside == 0) continue;
          w = vol * inside /
              (kSupersample * kSupersample * kSupersample);
        }
        nodes_.push_back(static_cast<std::uint32_t>(geom.index(ix, iy, iz)));
        weights_.push_back(w);
        measure_ += w;
      }
    }
  }
}

double BallQuadrature::integrate_pow(const std::vector<double>& values,
                                     double p) const {
  double s = 0.0;
  if (p == 1.0) {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      s += weights_[i] * std::fabs(values[nodes_[i]]);
  } else if (p == 2.0) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double v = values[nodes_[i]];
      s += weights_[i] * v * v;
    }
  } else if (p == 3.0) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double v = std::fabs(values[nodes_[i]]);
      s += weights_[i] * v * v * v;
    }
  } else {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      s += weights_[i] * std::pow(std::fabs(values[nodes_[i]]), p);
  }
  return s;
}

double BallQuadrature::integrate(const std::vector<double>& values) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    s += weights_[i] * values[nodes_[i]];
  return s;
}

double BallQuadrature::ess_sup(const std::vector<double>& values) const {
  double m = 0.0;
  for (std::uint32_t n : nodes_) m = std::fmax(m, std::fabs(values[n]));
  return m;
}

double integrate_ball(const ScalarSlice& slice, const BallSpec& ball,
                      double p) {
  if (!(p >= 1.0)) throw ParameterError("integrate_ball requires p >= 1");
  BallQuadrature quad(slice.geom, ball);
  if (quad.size() == 0)
    throw DomainError("ball does not intersect the sampled box");
  if (std::isinf(p)) return quad.ess_sup(slice.values);
  return quad.integrate_pow(slice.values, p);
}

Vec3 local_mean(const SampledField& field, double t, const BallSpec& ball) {
  const int k = field.sample_at_or_below(t);
  BallQuadrature quad(field.geometry(), ball);
  if (quad.size() == 0 || !(quad.measure() > 0.0))
    throw DomainError("ball does not intersect the sampled box");
  Vec3 mean;
  const std::size_t n = quad.size();
  const double* u1 = field.component_data(0, k);
  const double* u2 = field.component_data(1, k);
  const double* u3 = field.component_data(2, k);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t node = quad.nodes()[i];
    const double w = quad.weights()[i];
    mean.x += w * u1[node];
    mean.y += w * u2[node];
    mean.z += w * u3[node];
  }
  const double inv = 1.0 / quad.measure();
  return {mean.x * inv, mean.y * inv, mean.z * inv};
}

namespace {

// d/dx along one axis at node i: periodic wrap, central interior, one-sided
// second-order at non-periodic boundaries.
inline double axis_derivative(const double* f, int i, int n, std::ptrdiff_t s,
                              double h, bool periodic) {
  if (periodic) {
    const int ip = i + 1 == n ? 0 : i + 1;
    const int im = i == 0 ? n - 1 : i - 1;
    return (f[ip * s] - f[im * s]) / (2.0 * h);
  }
  if (i == 0) return (-3.0 * f[0] + 4.0 * f[s] - f[2 * s]) / (2.0 * h);
  if (i == n - 1)
    return (3.0 * f[i * s] - 4.0 * f[(i - 1) * s] + f[(i - 2) * s]) /
           (2.0 * h);
  return (f[(i + 1) * s] - f[(i - 1) * s]) / (2.0 * h);
}

}  // namespace

ScalarSlice gradient_squared_at_sample(const SampledField& field, int k) {
  const GridGeometry& g = field.geometry();
  for (int a = 0; a < 3; ++a)
    if (!g.periodic[static_cast<std::size_t>(a)] && g.dim(a) < 3)
      throw DomainError("gradient needs >= 3 nodes on non-periodic axes");

  ScalarSlice out{g, std::vector<double>(g.node_count(), 0.0)};
  const double hx = g.hx(), hy = g.hy(), hz = g.hz();
  const std::ptrdiff_t sx = 1;
  const std::ptrdiff_t sy = g.nx;
  const std::ptrdiff_t sz = static_cast<std::ptrdiff_t>(g.nx) * g.ny;

  for (int comp = 0; comp < 3; ++comp) {
    const double* f = field.component_data(comp, k);
    for (int iz = 0; iz < g.nz; ++iz) {
      for (int iy = 0; iy < g.ny; ++iy) {
        const double* row = f + iz * sz + iy * sy;
        double* orow = out.values.data() + iz * sz + iy * sy;
        for (int ix = 0; ix < g.nx; ++ix) {
          const double dx =
              axis_derivative(row, ix, g.nx, sx, hx, g.periodic[0]);
          const double dy = axis_derivative(f + iz * sz + ix, iy, g.ny, sy,
                                            hy, g.periodic[1]);
          const double dz = axis_derivative(f + iy * sy + ix, iz, g.nz, sz,
                                            hz, g.periodic[2]);
          orow[ix] += dx * dx + dy * dy + dz * dz;
        }
      }
    }
  }
  return out;
}

ScalarSlice gradient_squared(const SampledField& field, double t) {
  return gradient_squared_at_sample(field, field.sample_at_or_below(t));
}

}  // namespace nssl
