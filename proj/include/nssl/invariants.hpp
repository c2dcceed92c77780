/// @file invariants.hpp
/// @brief Scale-invariant cylinder quantities A, B, C, D and parabolic
///        rescaling.
#pragma once

#include <string>

#include "nssl/field.hpp"

namespace nssl {

/// Scale-invariant quantities over the parabolic cylinder Q_r(z0):
///   A = sup over contained samples of r^{-1} integral_{B_r} |u|^2,
///   B = r^{-1} time-integral of integral_{B_r} |grad u|^2,
///   C = r^{-2} time-integral of integral_{B_r} |u|^3,
///   D = r^{-2} time-integral of integral_{B_r} |P|^{3/2}.
/// Time integrals use the trapezoid rule over contained samples, extended to
/// the window endpoints with the nearest sample at or below. clipped is set
/// when [t0 - r^2, t0] sticks out of the sampled interval, in which case the
/// integrals run over the clipped window.
struct InvariantReport {
  double t0 = 0.0;
  Vec3 x0;
  double r = 0.0;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  bool has_D = false;
  bool clipped = false;
  int samples_used = 0;

  std::string to_json() const;
};

InvariantReport invariants(const SampledField& field, const CylinderSpec& cyl);

/// C alone, with the same window and trapezoid conventions as invariants().
/// Cheaper than the full report (no gradients), for dyadic descents.
double c_quantity(const SampledField& field, const CylinderSpec& cyl);

/// Parabolic rescaling u_lambda(t,x) = lambda u(lambda^2 t, lambda x),
/// P_lambda = lambda^2 P(lambda^2 t, lambda x), resampled onto a grid with
/// the same dims over box/lambda and time interval / lambda^2. Spatial values
/// are interpolated trilinearly (wrapping on periodic axes), time is resolved
/// to the nearest sample at or below.
SampledField rescale(const SampledField& field, double lambda);

}  // namespace nssl
