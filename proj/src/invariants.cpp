#include "nssl/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "nssl/errors.hpp"
#include "nssl/quadrature.hpp"

namespace nssl {

namespace {

// Trapezoid over the window [w0, w1] with nodes at the contained samples.
// The integrand is extended to the window endpoints as a constant, using
// the nearest sample at or below each endpoint.
struct TimeNodes {
  std::vector<int> samples;   // sample indices strictly inside (w0, w1)
  std::vector<double> times;  // w0, interior sample times, w1
  int k_begin_value = 0;      // sample supplying the value at w0
  int k_end_value = 0;        // sample supplying the value at w1
};

TimeNodes window_nodes(const SampledField& f, double w0, double w1) {
  TimeNodes tn;
  const double snap = 1e-9 * (f.t_end() - f.t_begin());
  tn.times.push_back(w0);
  for (int k = 0; k < f.nt(); ++k) {
    const double t = f.time(k);
    if (t > w0 + snap && t < w1 - snap) {
      tn.samples.push_back(k);
      tn.times.push_back(t);
    }
  }
  tn.times.push_back(w1);
  tn.k_begin_value = f.sample_at_or_below(w0);
  tn.k_end_value = f.sample_at_or_below(w1);
  return tn;
}

double trapezoid(const TimeNodes& tn, const std::vector<double>& node_values) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < tn.times.size(); ++i)
    acc += 0.5 * (node_values[i] + node_values[i + 1]) *
           (tn.times[i + 1] - tn.times[i]);
  return acc;
}

}  // namespace

InvariantReport invariants(const SampledField& field,
                           const CylinderSpec& cyl) {
  cyl.validate();
  InvariantReport rep;
  rep.t0 = cyl.t0;
  rep.x0 = cyl.center;
  rep.r = cyl.radius;

  double w0 = cyl.t_begin();
  double w1 = cyl.t0;
  const double snap = 1e-9 * (field.t_end() - field.t_begin());
  if (w1 > field.t_end() + snap || w0 < field.t_begin() - snap) {
    rep.clipped = true;
    w0 = std::fmax(w0, field.t_begin());
    w1 = std::fmin(w1, field.t_end());
  }
  if (!(w1 > w0))
    throw DomainError("cylinder time range does not overlap the field");

  // Samples participating in the integrals: those inside [w0, w1].
  std::vector<int> contained;
  for (int k = 0; k < field.nt(); ++k) {
    const double t = field.time(k);
    if (t >= w0 - snap && t <= w1 + snap) contained.push_back(k);
  }
  if (contained.size() < 2)
    throw DomainError("cylinder time range contains fewer than 2 samples");
  rep.samples_used = static_cast<int>(contained.size());

  BallQuadrature quad(field.geometry(), cyl.ball());
  if (quad.size() == 0)
    throw DomainError("cylinder ball does not intersect the box");

  const TimeNodes tn = window_nodes(field, w0, w1);
  const std::size_t nnode_vals = tn.samples.size() + 2;
  std::vector<double> i3(nnode_vals), g2(nnode_vals), p32(nnode_vals);

  const double r = cyl.radius;
  double a_max = 0.0;
  auto speed_pow = [&](int k, double p) {
    const double* u1 = field.component_data(0, k);
    const double* u2 = field.component_data(1, k);
    const double* u3 = field.component_data(2, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
      const std::uint32_t n = quad.nodes()[i];
      const double m2 = u1[n] * u1[n] + u2[n] * u2[n] + u3[n] * u3[n];
      acc += quad.weights()[i] * (p == 2.0 ? m2 : m2 * std::sqrt(m2));
    }
    return acc;
  };

  for (int k : contained) a_max = std::fmax(a_max, speed_pow(k, 2.0));
  rep.A = a_max / r;

  auto node_sample = [&](std::size_t i) {
    if (i == 0) return tn.k_begin_value;
    if (i + 1 == nnode_vals) return tn.k_end_value;
    return tn.samples[i - 1];
  };

  // Gradient and pressure integrands per distinct sample feeding the nodes.
  std::vector<int> distinct;
  for (std::size_t i = 0; i < nnode_vals; ++i) distinct.push_back(node_sample(i));
  std::vector<int> uniq = distinct;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

  std::vector<double> g2_by_sample(field.nt(), -1.0);
  std::vector<double> i3_by_sample(field.nt(), -1.0);
  std::vector<double> p32_by_sample(field.nt(), -1.0);
  for (int k : uniq) {
    const ScalarSlice grad = gradient_squared_at_sample(field, k);
    g2_by_sample[k] = quad.integrate(grad.values);
    i3_by_sample[k] = speed_pow(k, 3.0);
    if (field.has_pressure()) {
      const double* pr = field.pressure_data(k);
      double acc = 0.0;
      for (std::size_t i = 0; i < quad.size(); ++i) {
        const double v = std::fabs(pr[quad.nodes()[i]]);
        acc += quad.weights()[i] * v * std::sqrt(v);
      }
      p32_by_sample[k] = acc;
    }
  }
  for (std::size_t i = 0; i < nnode_vals; ++i) {
    const int k = node_sample(i);
    g2[i] = g2_by_sample[k];
    i3[i] = i3_by_sample[k];
    if (field.has_pressure()) p32[i] = p32_by_sample[k];
  }

  rep.B = trapezoid(tn, g2) / r;
  rep.C = trapezoid(tn, i3) / (r * r);
  if (field.has_pressure()) {
    rep.D = trapezoid(tn, p32) / (r * r);
    rep.has_D = true;
  }
  return rep;
}

double c_quantity(const SampledField& field, const CylinderSpec& cyl) {
  cyl.validate();
  double w0 = cyl.t_begin();
  double w1 = cyl.t0;
  const double snap = 1e-9 * (field.t_end() - field.t_begin());
  w0 = std::fmax(w0, field.t_begin());
  w1 = std::fmin(w1, field.t_end());
  if (!(w1 > w0))
    throw DomainError("cylinder time range does not overlap the field");
  int contained = 0;
  for (int k = 0; k < field.nt(); ++k) {
    const double t = field.time(k);
    if (t >= w0 - snap && t <= w1 + snap) ++contained;
  }
  if (contained < 2)
    throw DomainError("cylinder time range contains fewer than 2 samples");

  BallQuadrature quad(field.geometry(), cyl.ball());
  if (quad.size() == 0)
    throw DomainError("cylinder ball does not intersect the box");

  const TimeNodes tn = window_nodes(field, w0, w1);
  const std::size_t nn = tn.samples.size() + 2;
  std::vector<double> i3(nn);
  std::vector<double> by_sample(field.nt(), -1.0);
  auto cubed = [&](int k) {
    if (by_sample[k] >= 0.0) return by_sample[k];
    const double* u1 = field.component_data(0, k);
    const double* u2 = field.component_data(1, k);
    const double* u3 = field.component_data(2, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
      const std::uint32_t n = quad.nodes()[i];
      const double m2 = u1[n] * u1[n] + u2[n] * u2[n] + u3[n] * u3[n];
      acc += quad.weights()[i] * m2 * std::sqrt(m2);
    }
    by_sample[k] = acc;
    return acc;
  };
  i3[0] = cubed(tn.k_begin_value);
  for (std::size_t i = 0; i < tn.samples.size(); ++i)
    i3[i + 1] = cubed(tn.samples[i]);
  i3[nn - 1] = cubed(tn.k_end_value);
  return trapezoid(tn, i3) / (cyl.radius * cyl.radius);
}

std::string InvariantReport::to_json() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\"t0\":" << t0 << ",\"x0\":[" << x0.x << "," << x0.y << ","
      << x0.z << "],\"r\":" << r << ",\"A\":" << A << ",\"B\":" << B
      << ",\"C\":" << C << ",\"D\":";
  if (has_D)
    out << D;
  else
    out << "null";
  out << ",\"clipped\":" << (clipped ? "true" : "false")
      << ",\"samples_used\":" << samples_used << "}";
  return out.str();
}

SampledField rescale(const SampledField& field, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("rescale requires lambda > 0");
  const GridGeometry& g = field.geometry();

  GridGeometry g2 = g;
  g2.box.lo = (1.0 / lambda) * g.box.lo;
  g2.box.hi = (1.0 / lambda) * g.box.hi;
  const double l2 = lambda * lambda;
  SampledField out(g2, field.t_begin() / l2, field.t_end() / l2, field.nt(),
                   field.has_pressure());

  // Trilinear interpolation on the source grid, wrapping periodic axes and
  // clamping non-periodic ones.
  auto locate = [&](int axis, double coord, int* i0, int* i1, double* f) {
    const double h = g.spacing(axis);
    const int n = g.dim(axis);
    double pos = (coord - g.box.lo_axis(axis)) / h;
    if (g.periodic[static_cast<std::size_t>(axis)]) {
      pos = std::fmod(pos, static_cast<double>(n));
      if (pos < 0.0) pos += n;
      *i0 = static_cast<int>(std::floor(pos)) % n;
      *i1 = (*i0 + 1) % n;
      *f = pos - std::floor(pos);
    } else {
      if (pos <= 0.0) {
        *i0 = 0, *i1 = 0, *f = 0.0;
      } else if (pos >= n - 1) {
        *i0 = n - 1, *i1 = n - 1, *f = 0.0;
      } else {
        *i0 = static_cast<int>(std::floor(pos));
        *i1 = *i0 + 1;
        *f = pos - *i0;
      }
    }
  };

  const std::size_t nnode = g2.node_count();
  for (int k = 0; k < out.nt(); ++k) {
    const double t_src = out.time(k) * l2;
    const int ks = field.sample_at_or_below(t_src);
    for (int iz = 0; iz < g2.nz; ++iz) {
      for (int iy = 0; iy < g2.ny; ++iy) {
        for (int ix = 0; ix < g2.nx; ++ix) {
          const Vec3 xs = lambda * g2.node(ix, iy, iz);
          int x0i, x1i, y0i, y1i, z0i, z1i;
          double fx, fy, fz;
          locate(0, xs.x, &x0i, &x1i, &fx);
          locate(1, xs.y, &y0i, &y1i, &fy);
          locate(2, xs.z, &z0i, &z1i, &fz);
          const std::size_t node = g2.index(ix, iy, iz);

          auto interp = [&](const double* src) {
            const double c000 = src[g.index(x0i, y0i, z0i)];
            const double c100 = src[g.index(x1i, y0i, z0i)];
            const double c010 = src[g.index(x0i, y1i, z0i)];
            const double c110 = src[g.index(x1i, y1i, z0i)];
            const double c001 = src[g.index(x0i, y0i, z1i)];
            const double c101 = src[g.index(x1i, y0i, z1i)];
            const double c011 = src[g.index(x0i, y1i, z1i)];
            const double c111 = src[g.index(x1i, y1i, z1i)];
            const double c00 = c000 + fx * (c100 - c000);
            const double c10 = c010 + fx * (c110 - c010);
            const double c01 = c001 + fx * (c101 - c001);
            const double c11 = c011 + fx * (c111 - c011);
            const double c0 = c00 + fy * (c10 - c00);
            const double c1 = c01 + fy * (c11 - c01);
            return c0 + fz * (c1 - c0);
          };

          for (int c = 0; c < 3; ++c)
            out.u(c, k, node) = lambda * interp(field.component_data(c, ks));
          if (field.has_pressure())
            out.p(k, node) = l2 * interp(field.pressure_data(ks));
        }
      }
    }
  }
  (void)nnode;
  return out;
}

}  // namespace nssl
