/// @file quadrature.hpp
/// @brief Ball quadrature, local means, and discrete gradients on lattices.
#pragma once

#include <cstdint>
#include <vector>

#include "nssl/field.hpp"
#include "nssl/geometry.hpp"

namespace nssl {

/// Cell-volume quadrature over B_r(x0) intersected with the box.
///
/// Cells fully inside the ball count with their full volume, cells cut by
/// the sphere with a fractional coverage estimated from a fixed 4^3
/// supersample of the cell. Balls are geometric in box coordinates; they do
/// not wrap across periodic boundaries. Construction is deterministic.
class BallQuadrature {
 public:
  BallQuadrature(const GridGeometry& geom, const BallSpec& ball);

  /// Covered node count (cells with positive coverage).
  std::size_t size() const { return nodes_.size(); }
  /// Measure of B_r(x0) within the box, Sum of coverage-weighted cell volumes.
  double measure() const { return measure_; }
  const std::vector<std::uint32_t>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Sum of w_i * f(node_i) over covered cells.
  template <class F>
  double accumulate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      s += weights_[i] * f(nodes_[i]);
    return s;
  }

  /// integral of |values|^p over the covered region (p < infinity).
  double integrate_pow(const std::vector<double>& values, double p) const;
  /// Signed integral of values (no absolute value, exponent 1).
  double integrate(const std::vector<double>& values) const;
  /// Essential supremum of |values| over covered cells.
  double ess_sup(const std::vector<double>& values) const;

 private:
  std::vector<std::uint32_t> nodes_;
  std::vector<double> weights_;
  double measure_ = 0.0;
};

/// integral over B(ball) of |f|^p dx for a scalar lattice, with p = infinity
/// read as the essential sup over covered cells. Throws DomainError when the
/// ball misses the box entirely, ParameterError for p < 1.
double integrate_ball(const ScalarSlice& slice, const BallSpec& ball,
                      double p);

/// Volume average of the velocity vector over B(ball) at the sample nearest
/// at-or-below t.
Vec3 local_mean(const SampledField& field, double t, const BallSpec& ball);

/// Lattice of |grad u|^2 = Sum_ij (d_j u_i)^2 at time sample k. Central
/// differences inside, wrap on periodic axes, one-sided second-order stencils
/// on non-periodic boundaries (requires >= 3 nodes on those axes).
ScalarSlice gradient_squared_at_sample(const SampledField& field, int k);

/// Same, with t resolved to the nearest sample at or below.
ScalarSlice gradient_squared(const SampledField& field, double t);

}  // namespace nssl
