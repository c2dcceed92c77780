#include "nssl/energy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "fft3.hpp"
#include "nssl/errors.hpp"
#include "nssl/quadrature.hpp"

namespace nssl {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Quintic smoothstep on [0, 1]: Q(0)=0, Q(1)=1, Q'=Q''=0 at both ends.
inline double quintic(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
inline double quintic_d1(double x) {
  const double y = 1.0 - x;
  return 30.0 * x * x * y * y;
}
inline double quintic_d2(double x) {
  return 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
}

}  // namespace

HeatTestFunction::HeatTestFunction(double t0, Vec3 x0, double r, double rho)
    : t0_(t0), x0_(x0), r_(r), rho_(rho) {
  if (!(rho > 0.0)) throw ParameterError("cutoff scale rho must be positive");
  if (!(r > 0.0) || r > 0.5 * rho)
    throw ParameterError("kernel scale must satisfy 0 < r <= rho / 2");
}

PhiEval HeatTestFunction::evaluate(double t, Vec3 x) const {
  PhiEval out;
  const double tau = t - t0_;
  const double s = r_ * r_ - tau;
  if (!(s > 0.0))
    throw DomainError("test function evaluated at or beyond its kernel time");

  // Time cutoff: 0 below tau = -3 rho^2 / 8, 1 above tau = -rho^2 / 4.
  const double tw = rho_ * rho_ / 8.0;
  const double t_lo = -3.0 * rho_ * rho_ / 8.0;
  double tc, tc_d = 0.0;
  if (tau <= t_lo) return out;
  if (tau >= t_lo + tw) {
    tc = 1.0;
  } else {
    const double eta = (tau - t_lo) / tw;
    tc = quintic(eta);
    tc_d = quintic_d1(eta) / tw;
  }

  // Space cutoff: 1 inside d = rho/2, 0 outside d = 5 rho / 8.
  const Vec3 rel = x - x0_;
  const double d2 = rel.norm_sq();
  const double d_lo = 0.5 * rho_;
  const double dw = rho_ / 8.0;
  const double d_hi = d_lo + dw;
  if (d2 >= d_hi * d_hi) return out;
  double sc = 1.0, sc_d = 0.0, sc_dd = 0.0;
  double d = 0.0;
  if (d2 > d_lo * d_lo) {
    d = std::sqrt(d2);
    const double xi = (d - d_lo) / dw;
    sc = 1.0 - quintic(xi);
    sc_d = -quintic_d1(xi) / dw;
    sc_dd = -quintic_d2(xi) / (dw * dw);
  }

  const double psi = std::pow(4.0 * kPi * s, -1.5) * std::exp(-d2 / (4.0 * s));
  const double chi = sc * tc;
  out.phi = chi * psi;

  // grad phi = chi grad psi + psi grad chi, with grad psi = -psi rel / (2s)
  // and grad chi = tc sc'(d) rel / d.
  const double gpsi_c = -psi / (2.0 * s);
  double gchi_c = 0.0;
  if (sc_d != 0.0) gchi_c = tc * sc_d / d;
  out.grad = (chi * gpsi_c + psi * gchi_c) * rel;

  // psi is caloric for d_t + Lap, so only cutoff terms survive:
  //   heat = psi (d_t chi + Lap chi) + 2 grad chi . grad psi.
  if (tc_d != 0.0 || sc_d != 0.0) {
    double lap_chi = 0.0;
    if (sc_d != 0.0) lap_chi = tc * (sc_dd + 2.0 * sc_d / d);
    const double cross = 2.0 * gchi_c * gpsi_c * d2;
    out.heat = psi * (sc * tc_d + lap_chi) + cross;
  }
  return out;
}

std::vector<double> HeatTestFunction::sample(const GridGeometry& geom,
                                             double t) const {
  std::vector<double> out(geom.node_count(), 0.0);
  for (int iz = 0; iz < geom.nz; ++iz)
    for (int iy = 0; iy < geom.ny; ++iy)
      for (int ix = 0; ix < geom.nx; ++ix)
        out[geom.index(ix, iy, iz)] = phi(t, geom.node(ix, iy, iz));
  return out;
}

namespace {

constexpr int kCellAverage = 6;  // sub-points per axis for phi cell means

struct SupportCell {
  std::size_t node;
  double lo[3], hi[3];
  double vol;
};

// Cells whose extent can intersect the ball of radius rad about c. Literal
// coordinates, clamped to the grid (balls never wrap).
void cell_window(const GridGeometry& g, int axis, double c, double rad,
                 int* i0, int* i1) {
  const double h = g.spacing(axis);
  const double lo = g.box.lo_axis(axis);
  const double a = (c - rad - lo) / h + 0.5;
  const double b = (c + rad - lo) / h - 0.5;
  *i0 = std::max(0, static_cast<int>(std::floor(a)) - 1);
  *i1 = std::min(g.dim(axis) - 1, static_cast<int>(std::ceil(b)) + 1);
}

std::vector<SupportCell> support_cells(const GridGeometry& g, Vec3 x0,
                                       double rad) {
  int w[3][2];
  cell_window(g, 0, x0.x, rad, &w[0][0], &w[0][1]);
  cell_window(g, 1, x0.y, rad, &w[1][0], &w[1][1]);
  cell_window(g, 2, x0.z, rad, &w[2][0], &w[2][1]);
  std::vector<SupportCell> cells;
  for (int iz = w[2][0]; iz <= w[2][1]; ++iz) {
    double zl, zh;
    g.cell_bounds(2, iz, &zl, &zh);
    for (int iy = w[1][0]; iy <= w[1][1]; ++iy) {
      double yl, yh;
      g.cell_bounds(1, iy, &yl, &yh);
      for (int ix = w[0][0]; ix <= w[0][1]; ++ix) {
        double xl, xh;
        g.cell_bounds(0, ix, &xl, &xh);
        SupportCell cell;
        cell.node = g.index(ix, iy, iz);
        cell.lo[0] = xl, cell.hi[0] = xh;
        cell.lo[1] = yl, cell.hi[1] = yh;
        cell.lo[2] = zl, cell.hi[2] = zh;
        cell.vol = (xh - xl) * (yh - yl) * (zh - zl);
        if (cell.vol > 0.0) cells.push_back(cell);
      }
    }
  }
  return cells;
}

struct CellPhi {
  double phi = 0.0;
  Vec3 grad;
  double heat = 0.0;
};

// Mean of phi, grad phi, and the heat-operator value over one cell, by a
// kCellAverage^3 midpoint rule. The cutoff transition is about one cell wide
// on production grids, so nodal sampling is too coarse here.
CellPhi cell_mean(const HeatTestFunction& phi, double t,
                  const SupportCell& cell) {
  CellPhi acc;
  const int K = kCellAverage;
  const double fx = (cell.hi[0] - cell.lo[0]) / K;
  const double fy = (cell.hi[1] - cell.lo[1]) / K;
  const double fz = (cell.hi[2] - cell.lo[2]) / K;
  for (int a = 0; a < K; ++a) {
    const double z = cell.lo[2] + (a + 0.5) * fz;
    for (int b = 0; b < K; ++b) {
      const double y = cell.lo[1] + (b + 0.5) * fy;
      for (int c = 0; c < K; ++c) {
        const double x = cell.lo[0] + (c + 0.5) * fx;
        const PhiEval e = phi.evaluate(t, {x, y, z});
        acc.phi += e.phi;
        acc.grad = acc.grad + e.grad;
        acc.heat += e.heat;
      }
    }
  }
  const double inv = 1.0 / (K * K * K);
  acc.phi *= inv;
  acc.grad = inv * acc.grad;
  acc.heat *= inv;
  return acc;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    acc += 0.5 * (v[i] + v[i + 1]) * (t[i + 1] - t[i]);
  return acc;
}

}  // namespace

EnergyResidual energy_residual(const SampledField& field, double t0, Vec3 x0,
                               double r, double rho) {
  const HeatTestFunction phi(t0, x0, r, rho);
  if (!field.has_pressure())
    throw DomainError("energy residual requires a pressure field");
  const GridGeometry& g = field.geometry();
  const double support = 5.0 * rho / 8.0;
  for (int a = 0; a < 3; ++a) {
    const double c = a == 0 ? x0.x : (a == 1 ? x0.y : x0.z);
    if (c - support < g.box.lo_axis(a) || c + support > g.box.hi_axis(a))
      throw DomainError("test function support exceeds the box");
  }
  const double w0 = t0 - 3.0 * rho * rho / 8.0;
  const double w1 = t0;
  if (!field.covers_time(w0) || !field.covers_time(w1))
    throw DomainError("test function time support exceeds the field");

  // Time nodes: window endpoints plus samples strictly inside. The integrand
  // vanishes identically at w0 (the time cutoff is zero there).
  const double snap = 1e-9 * (field.t_end() - field.t_begin());
  std::vector<double> times{w0};
  std::vector<int> node_sample{-1};
  int contained = 0;
  for (int k = 0; k < field.nt(); ++k) {
    const double t = field.time(k);
    if (t >= w0 - snap && t <= w1 + snap) ++contained;
    if (t > w0 + snap && t < w1 - snap) {
      times.push_back(t);
      node_sample.push_back(k);
    }
  }
  times.push_back(w1);
  node_sample.push_back(field.sample_at_or_below(w1));
  if (contained < 2)
    throw DomainError("test function window contains fewer than 2 samples");

  const std::vector<SupportCell> cells = support_cells(g, x0, support);
  std::map<int, ScalarSlice> grad_cache;
  auto grad_sq = [&](int k) -> const std::vector<double>& {
    auto it = grad_cache.find(k);
    if (it == grad_cache.end())
      it = grad_cache.emplace(k, gradient_squared_at_sample(field, k)).first;
    return it->second.values;
  };

  const std::size_t nn = times.size();
  std::vector<double> lhs_t(nn, 0.0), rhs_t(nn, 0.0);
  std::vector<CellPhi> final_phi;  // phi means at w1, reused for the end term

  for (std::size_t i = 1; i < nn; ++i) {
    const int k = node_sample[i];
    const double* u1 = field.component_data(0, k);
    const double* u2 = field.component_data(1, k);
    const double* u3 = field.component_data(2, k);
    const double* pr = field.pressure_data(k);
    const std::vector<double>& g2 = grad_sq(k);
    double lhs_acc = 0.0, rhs_acc = 0.0;
    const bool at_end = (i + 1 == nn);
    if (at_end) final_phi.reserve(cells.size());
    for (const SupportCell& cell : cells) {
      const CellPhi m = cell_mean(phi, times[i], cell);
      if (at_end) final_phi.push_back(m);
      const std::size_t n = cell.node;
      const double m2 = u1[n] * u1[n] + u2[n] * u2[n] + u3[n] * u3[n];
      const double adv = u1[n] * m.grad.x + u2[n] * m.grad.y + u3[n] * m.grad.z;
      lhs_acc += 2.0 * g2[n] * m.phi * cell.vol;
      rhs_acc += (m2 * m.heat + (m2 + 2.0 * pr[n]) * adv) * cell.vol;
    }
    lhs_t[i] = lhs_acc;
    rhs_t[i] = rhs_acc;
  }

  double final_term = 0.0;
  {
    const int k = node_sample[nn - 1];
    const double* u1 = field.component_data(0, k);
    const double* u2 = field.component_data(1, k);
    const double* u3 = field.component_data(2, k);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::size_t n = cells[c].node;
      const double m2 = u1[n] * u1[n] + u2[n] * u2[n] + u3[n] * u3[n];
      final_term += m2 * final_phi[c].phi * cells[c].vol;
    }
  }

  EnergyResidual out;
  out.residual = trapezoid(times, rhs_t) - final_term - trapezoid(times, lhs_t);

  // Normalization scale: sup-in-time r^{-1} local energy over Q_rho, clipped
  // to the sampled time range, times rho^3.
  BallQuadrature quad(g, BallSpec{x0, rho});
  const double a0 = std::fmax(field.t_begin(), t0 - rho * rho);
  double a_max = 0.0;
  for (int k = 0; k < field.nt(); ++k) {
    const double t = field.time(k);
    if (t < a0 - snap || t > t0 + snap) continue;
    const double* u1 = field.component_data(0, k);
    const double* u2 = field.component_data(1, k);
    const double* u3 = field.component_data(2, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
      const std::uint32_t n = quad.nodes()[i];
      acc += quad.weights()[i] *
             (u1[n] * u1[n] + u2[n] * u2[n] + u3[n] * u3[n]);
    }
    a_max = std::fmax(a_max, acc);
  }
  out.scale = (a_max / rho) * rho * rho * rho;
  return out;
}

ScalarSlice solve_pressure_periodic(const GridGeometry& geom,
                                    const std::vector<double>& u1,
                                    const std::vector<double>& u2,
                                    const std::vector<double>& u3) {
  geom.validate();
  for (int a = 0; a < 3; ++a)
    if (!geom.periodic[static_cast<std::size_t>(a)])
      throw DomainError("spectral pressure requires a fully periodic box");
  const std::size_t nn = geom.node_count();
  if (u1.size() != nn || u2.size() != nn || u3.size() != nn)
    throw ParameterError("component size does not match the grid");

  fft::Transform3 fft(geom.nx, geom.ny, geom.nz);
  const double kx0 = 2.0 * kPi / geom.box.length(0);
  const double ky0 = 2.0 * kPi / geom.box.length(1);
  const double kz0 = 2.0 * kPi / geom.box.length(2);

  // -Lap P = d_i d_j (u_i u_j): form the six products in physical space,
  // transform, and assemble P-hat = -k_i k_j W_ij-hat / |k|^2.
  const std::vector<double>* comp[3] = {&u1, &u2, &u3};
  std::vector<std::complex<double>> phat(nn, 0.0);
  std::vector<std::complex<double>> work(nn);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const double* a = comp[i]->data();
      const double* b = comp[j]->data();
      for (std::size_t n = 0; n < nn; ++n) work[n] = a[n] * b[n];
      fft.forward(work.data());
      const double sym = (i == j) ? 1.0 : 2.0;
      std::size_t n = 0;
      for (int iz = 0; iz < geom.nz; ++iz) {
        const double kz = kz0 * fft::freq(iz, geom.nz);
        for (int iy = 0; iy < geom.ny; ++iy) {
          const double ky = ky0 * fft::freq(iy, geom.ny);
          for (int ix = 0; ix < geom.nx; ++ix, ++n) {
            const double kx = kx0 * fft::freq(ix, geom.nx);
            const double k2 = kx * kx + ky * ky + kz * kz;
            if (k2 == 0.0) continue;
            const double ki = i == 0 ? kx : (i == 1 ? ky : kz);
            const double kj = j == 0 ? kx : (j == 1 ? ky : kz);
            phat[n] -= sym * ki * kj / k2 * work[n];
          }
        }
      }
    }
  }
  fft.inverse(phat.data());
  ScalarSlice out{geom, std::vector<double>(nn)};
  const double inv = 1.0 / static_cast<double>(nn);
  for (std::size_t n = 0; n < nn; ++n) out.values[n] = phat[n].real() * inv;
  return out;
}

SampledField with_spectral_pressure(const SampledField& field) {
  const GridGeometry& g = field.geometry();
  SampledField out(g, field.t_begin(), field.t_end(), field.nt(), true);
  const std::size_t nn = g.node_count();
  for (int k = 0; k < field.nt(); ++k) {
    std::vector<double> u1(field.component_data(0, k),
                           field.component_data(0, k) + nn);
    std::vector<double> u2(field.component_data(1, k),
                           field.component_data(1, k) + nn);
    std::vector<double> u3(field.component_data(2, k),
                           field.component_data(2, k) + nn);
    const ScalarSlice p = solve_pressure_periodic(g, u1, u2, u3);
    for (std::size_t n = 0; n < nn; ++n) {
      out.u(0, k, n) = u1[n];
      out.u(1, k, n) = u2[n];
      out.u(2, k, n) = u3[n];
      out.p(k, n) = p.values[n];
    }
  }
  return out;
}

DecayBound pressure_decay_bound(const SampledField& field, double t0, Vec3 x0,
                                double r, double rho, double c_cal) {
  if (!(r > 0.0) || !(r < 0.5 * rho))
    throw ParameterError("decay bound requires 0 < r < rho / 2");
  if (!(c_cal > 0.0)) throw ParameterError("calibration constant must be positive");
  if (!field.has_pressure())
    throw DomainError("pressure decay bound requires a pressure field");
  const InvariantReport fine = invariants(field, CylinderSpec{t0, x0, r});
  const InvariantReport coarse = invariants(field, CylinderSpec{t0, x0, rho});
  DecayBound out;
  out.lhs = fine.D;
  out.rhs = c_cal * (r / rho) * coarse.D +
            c_cal * (rho / r) * (rho / r) * coarse.C;
  return out;
}

}  // namespace nssl
