/// @file energy.hpp
/// @brief Heat-kernel test functions, the local energy inequality residual,
///        spectral pressure, and the pressure decay bound.
#pragma once

#include "nssl/field.hpp"
#include "nssl/invariants.hpp"

namespace nssl {

/// Pointwise evaluation of the test function and its derivatives.
struct PhiEval {
  double phi = 0.0;
  Vec3 grad;
  /// d_t phi + Laplacian phi (exactly zero where the cutoff is identically 1).
  double heat = 0.0;
};

/// Test function phi = chi * psi anchored at z0 = (t0, x0), where psi is the
/// backward heat kernel
///   psi(t,x) = (4 pi (r^2 - tau))^{-3/2} exp(-|x - x0|^2 / (4 (r^2 - tau))),
/// tau = t - t0, and chi is a smooth cutoff equal to 1 on Q_{rho/2}(z0) and
/// vanishing outside Q_{3 rho/4}(z0). The cutoff is a product of quintic
/// smoothsteps in |x - x0| (transition width rho/8 starting at rho/2) and in
/// tau (width rho^2/8 ending at -rho^2/4), which keeps phi twice continuously
/// differentiable. Requires 0 < r <= rho/2.
class HeatTestFunction {
 public:
  HeatTestFunction(double t0, Vec3 x0, double r, double rho);

  double r() const { return r_; }
  double rho() const { return rho_; }

  PhiEval evaluate(double t, Vec3 x) const;
  double phi(double t, Vec3 x) const { return evaluate(t, x).phi; }

  /// phi sampled on the grid at one time.
  std::vector<double> sample(const GridGeometry& geom, double t) const;

 private:
  double t0_;
  Vec3 x0_;
  double r_, rho_;
};

/// Residual of the local energy inequality over Q_rho(z0) with the heat test
/// function (kernel scale r, cutoff scale rho, viscosity 1):
///   residual = [rhs] - [lhs],
///   lhs = integral |u(t_end)|^2 phi + 2 * time-integral of |grad u|^2 phi,
///   rhs = time-integral of |u|^2 (d_t phi + Lap phi) + (|u|^2 + 2P) u.grad phi.
/// Positive residual means the inequality holds with slack. scale is the
/// cylinder energy scale A(u, rho, z0) * rho^3 used to normalize tolerances.
struct EnergyResidual {
  double residual = 0.0;
  double scale = 0.0;
};

EnergyResidual energy_residual(const SampledField& field, double t0, Vec3 x0,
                               double r, double rho);

/// Solves -Lap P = d_i d_j (u_i u_j) on the fully periodic box by FFT, with
/// zero mean. The identity holds in the discrete spectral sense to round-off.
ScalarSlice solve_pressure_periodic(const GridGeometry& geom,
                                    const std::vector<double>& u1,
                                    const std::vector<double>& u2,
                                    const std::vector<double>& u3);

/// Copy of the field with pressure replaced (or added) by the spectral solve
/// at every time sample. Requires a fully periodic grid.
SampledField with_spectral_pressure(const SampledField& field);

/// Both sides of the pressure decay bound between scales r < rho/2:
///   lhs = D(P, r),  rhs = C_cal (r/rho) D(P, rho) + C_cal (rho/r)^2 C(u, rho).
struct DecayBound {
  double lhs = 0.0;
  double rhs = 0.0;
};

DecayBound pressure_decay_bound(const SampledField& field, double t0, Vec3 x0,
                                double r, double rho, double c_cal);

}  // namespace nssl
