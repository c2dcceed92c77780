/// @file lorentz.hpp
/// @brief Distribution functions, weak and Lorentz norms, tail-split bounds.
#pragma once

#include <string>
#include <vector>

#include "nssl/field.hpp"
#include "nssl/quadrature.hpp"

namespace nssl {

/// Exact distribution function of a step function (a lattice restricted to a
/// ball, or a time series with its cell weights).
///
/// breakpoints hold the distinct values sigma_k in increasing order together
/// with m_k = measure of {|f| > sigma_k}; m is right-continuous, m at the
/// largest value is 0, and m(sigma) = total_measure for sigma below the
/// smallest value.
struct DistributionCurve {
  struct Breakpoint {
    double sigma;
    double measure_above;
  };
  std::vector<Breakpoint> breakpoints;
  double total_measure = 0.0;

  std::string to_csv() const;
};

/// Scalar samples on a time window [window_begin, window_end]. Each sample
/// owns the interval between the midpoints to its neighbours, clipped to the
/// window, which is the measure used by distribution().
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
  double window_begin = 0.0;
  double window_end = 0.0;

  void validate() const;
  std::vector<double> weights() const;
};

DistributionCurve distribution(const ScalarSlice& slice, const BallSpec& ball);
DistributionCurve distribution(const BallQuadrature& quad,
                               const std::vector<double>& values);
DistributionCurve distribution(const TimeSeries& series);
/// Distribution of explicitly weighted values (parallel arrays, |values|).
DistributionCurve distribution(const std::vector<double>& values,
                               const std::vector<double>& weights);

/// Weak L^p norm sup_sigma sigma * m(sigma)^{1/p}. For step distributions the
/// sup is attained approaching a jump from the left, so each breakpoint is
/// scored as sigma_k * m(sigma_k^-)^{1/p} with m(sigma_k^-) the measure of
/// {|f| >= sigma_k}. p = infinity returns the essential sup.
double weak_norm(const DistributionCurve& curve, double p);
double weak_norm(const ScalarSlice& slice, const BallSpec& ball, double p);

/// Lorentz L^{r,s} norm (r, s finite) via the closed form of the layer-cake
/// integral on a step distribution:
///   ||f|| = ( r * Sum_k m_{k-1}^{s/r} (sigma_k^s - sigma_{k-1}^s) / s )^{1/s}.
/// For constants on [0,T] this gives (r/s)^{1/s} c T^{1/r}, the L^r norm when
/// r = s.
double lorentz_rs_norm(const DistributionCurve& curve, double r, double s);

/// Regimes of the closed-form tail-split bound for the time integral of a
/// Morrey profile with weak-norm control. Selected by the spatial exponent p:
/// Subcritical covers 2 <= p < 3, Mid covers 3 <= p <= 6, High covers
/// 6 < p <= infinity.
enum class TailRegime { Subcritical, Mid, High };

TailRegime tail_regime_for(double p);

/// Upper bound for the window integral of f(t)^alpha given the weak L^q
/// control ||f||_{L^{q,infinity}} <= M on a window of length r^2, where
/// 1/q = 1/2 - 1/p and alpha is the regime's exponent (3p/(2p-3), p/(p-2),
/// or 3/2). p may be infinity in the High regime; the bound is then
/// 4 r^{1/2} M^{3/2}.
double tail_split_bound(double p, double r, double M, TailRegime regime);

/// The exponent alpha integrated in each regime.
double tail_split_exponent(double p, TailRegime regime);

}  // namespace nssl
