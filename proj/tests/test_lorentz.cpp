/// @file test_lorentz.cpp
/// @brief Distribution curves, weak/Lorentz norms, and tail-split bounds.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "nssl/errors.hpp"
#include "nssl/lorentz.hpp"
#include "nssl/quadrature.hpp"
#include "nssl/synth.hpp"
#include "nssl/verify.hpp"

using namespace nssl;
using namespace nssl::testing;

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

/// m(sigma) of a right-continuous step curve.
double measure_at(const DistributionCurve& curve, double sigma) {
  double m = curve.total_measure;
  for (const auto& b : curve.breakpoints) {
    if (b.sigma > sigma) break;
    m = b.measure_above;
  }
  return m;
}
}  // namespace

TEST_CASE("distribution of an indicator and of zero") {
  SUBCASE("indicator of half a unit-measure region") {
    std::vector<double> values(10, 0.0);
    std::fill(values.begin() + 5, values.end(), 1.0);
    const std::vector<double> weights(10, 0.1);
    const DistributionCurve curve = distribution(values, weights);
    CHECK(curve.total_measure == doctest::Approx(1.0));
    CHECK(measure_at(curve, 0.5) == doctest::Approx(0.5));
    CHECK(measure_at(curve, 1.0) == 0.0);
  }
  SUBCASE("zero function has the single breakpoint (0, 0)") {
    const std::vector<double> values(6, 0.0);
    const std::vector<double> weights(6, 0.25);
    const DistributionCurve curve = distribution(values, weights);
    REQUIRE(curve.breakpoints.size() == 1);
    CHECK(curve.breakpoints[0].sigma == 0.0);
    CHECK(curve.breakpoints[0].measure_above == 0.0);
    CHECK(weak_norm(curve, 3.0) == 0.0);
  }
  SUBCASE("empty or inconsistent input is rejected") {
    const std::vector<double> none;
    CHECK_THROWS_AS(distribution(none, none), DomainError);
    CHECK_THROWS_AS(
        distribution(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}),
        ParameterError);
    CHECK_THROWS_AS(distribution(std::vector<double>{1.0, 2.0},
                                 std::vector<double>{0.5, -0.5}),
                    ParameterError);
  }
}

TEST_CASE("radial profile distribution follows (4 pi / 3) sigma^-3") {
  const SampledField field = generate(radial_spec(96));
  const BallSpec ball{{kPi, kPi, kPi}, 1.0};
  const DistributionCurve curve = distribution(field.speed_slice(0), ball);
  // Away from the extremes the sampled curve tracks the continuum law.
  for (double sigma : {1.3, 2.0, 3.0}) {
    const double expected = 4.0 * kPi / 3.0 / (sigma * sigma * sigma);
    CHECK(measure_at(curve, sigma) ==
          doctest::Approx(expected).epsilon(0.05));
  }
}

TEST_CASE("weak norm closed forms") {
  SUBCASE("inverse radial profile at p = 3") {
    const double c = 2.0;
    const SampledField field = generate(radial_spec(64, c));
    const double v =
        weak_norm(field.speed_slice(0), BallSpec{{kPi, kPi, kPi}, 1.0}, 3.0);
    CHECK(v == doctest::Approx(std::cbrt(4.0 * kPi / 3.0) * c).epsilon(0.02));
  }
  SUBCASE("constants give c m^{1/p}") {
    const std::vector<double> values(4, 2.5);
    const std::vector<double> weights(4, 0.3);
    const DistributionCurve curve = distribution(values, weights);
    CHECK(weak_norm(curve, 2.0) ==
          doctest::Approx(2.5 * std::sqrt(1.2)).epsilon(1e-12));
    CHECK(weak_norm(curve, kInf) == doctest::Approx(2.5));
  }
  SUBCASE("p below 1 is rejected") {
    const DistributionCurve curve = distribution(std::vector<double>{1.0},
                                                 std::vector<double>{1.0});
    CHECK_THROWS_AS(weak_norm(curve, 0.99), ParameterError);
  }
}

TEST_CASE("weak norm is dominated by the strong norm (Chebyshev)") {
  const GridGeometry geom = cube_grid(10, -1.0, 1.0, false);
  const BallSpec ball{{0.0, 0.0, 0.0}, 0.8};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ScalarSlice slice = random_slice(geom, seed);
    for (double p : {2.0, 3.0, 4.0, 6.0}) {
      const double weak = weak_norm(slice, ball, p);
      const double strong = std::pow(integrate_ball(slice, ball, p), 1.0 / p);
      CHECK(weak <= strong * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("weak and Lorentz norms are homogeneous of degree 1") {
  const GridGeometry geom = cube_grid(10, -1.0, 1.0, false);
  const BallSpec ball{{0.0, 0.0, 0.0}, 0.8};
  const double lambda = 3.7;
  ScalarSlice slice = random_slice(geom, 11);
  ScalarSlice scaled = slice;
  for (double& v : scaled.values) v *= lambda;

  for (double p : {1.5, 2.0, 5.0})
    CHECK(weak_norm(scaled, ball, p) ==
          doctest::Approx(lambda * weak_norm(slice, ball, p)).epsilon(1e-12));

  const DistributionCurve base = distribution(slice, ball);
  const DistributionCurve big = distribution(scaled, ball);
  CHECK(lorentz_rs_norm(big, 3.0, 2.0) ==
        doctest::Approx(lambda * lorentz_rs_norm(base, 3.0, 2.0))
            .epsilon(1e-12));
}

TEST_CASE("weak norm grows with the region") {
  const GridGeometry geom = cube_grid(24, -2.0, 2.0, false);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ScalarSlice slice = random_slice(geom, 100 + seed);
    for (double p : {2.0, 4.0}) {
      const double small =
          weak_norm(slice, BallSpec{{0.0, 0.0, 0.0}, 0.7}, p);
      const double large =
          weak_norm(slice, BallSpec{{0.0, 0.0, 0.0}, 1.4}, p);
      CHECK(small <= large * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("Lorentz r,s norm closed forms") {
  SUBCASE("constant series on a window") {
    const double c = 2.0, T = 0.7;
    TimeSeries series;
    series.window_begin = 0.0;
    series.window_end = T;
    series.times = {0.1, 0.3, 0.6};
    series.values = {c, c, c};
    const DistributionCurve curve = distribution(series);
    const double r = 3.0, s = 2.0;
    CHECK(lorentz_rs_norm(curve, r, s) ==
          doctest::Approx(std::pow(r / s, 1.0 / s) * c * std::pow(T, 1.0 / r))
              .epsilon(1e-12));
    // r = s reduces to the L^r norm of a constant.
    CHECK(lorentz_rs_norm(curve, 3.0, 3.0) ==
          doctest::Approx(c * std::pow(T, 1.0 / 3.0)).epsilon(1e-12));
  }
  SUBCASE("two-piece step against sigma quadrature") {
    // Value 2 on measure 1/4, value 1 on measure 3/4.
    const std::vector<double> values = {2.0, 1.0};
    const std::vector<double> weights = {0.25, 0.75};
    const DistributionCurve curve = distribution(values, weights);
    const double r = 2.5, s = 1.5;
    // Brute-force layer cake: (r int_0^max sigma^{s-1} m(sigma)^{s/r})^{1/s}.
    const int n = 1000000;
    const double h = 2.0 / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sigma = (i + 0.5) * h;
      const double m = sigma < 1.0 ? 1.0 : (sigma < 2.0 ? 0.25 : 0.0);
      acc += std::pow(sigma, s - 1.0) * std::pow(m, s / r) * h;
    }
    const double oracle = std::pow(r * acc, 1.0 / s);
    CHECK(lorentz_rs_norm(curve, r, s) ==
          doctest::Approx(oracle).epsilon(1e-4));
  }
  SUBCASE("zero series gives zero") {
    TimeSeries series;
    series.window_begin = 0.0;
    series.window_end = 1.0;
    series.times = {0.5};
    series.values = {0.0};
    CHECK(lorentz_rs_norm(distribution(series), 2.0, 2.0) == 0.0);
  }
}

TEST_CASE("time series cell weights partition the window") {
  TimeSeries series;
  series.window_begin = 0.0;
  series.window_end = 1.0;
  series.times = {0.0, 0.4, 1.0};
  series.values = {1.0, 1.0, 1.0};
  const std::vector<double> w = series.weights();
  REQUIRE(w.size() == 3);
  CHECK(w[0] == doctest::Approx(0.2));
  CHECK(w[1] == doctest::Approx(0.5));
  CHECK(w[2] == doctest::Approx(0.3));
  CHECK(distribution(series).total_measure == doctest::Approx(1.0));

  series.times = {0.4, 0.0, 1.0};
  CHECK_THROWS_AS(series.validate(), ParameterError);
}

TEST_CASE("tail regimes and printed closed forms") {
  CHECK(tail_regime_for(2.0) == TailRegime::Subcritical);
  CHECK(tail_regime_for(2.99) == TailRegime::Subcritical);
  CHECK(tail_regime_for(3.0) == TailRegime::Mid);
  CHECK(tail_regime_for(6.0) == TailRegime::Mid);
  CHECK(tail_regime_for(6.5) == TailRegime::High);
  CHECK(tail_regime_for(kInf) == TailRegime::High);
  CHECK_THROWS_AS(tail_regime_for(1.5), ParameterError);

  // p = 3, r = 0.5, M = 2 in the mid regime: 2 r M^{p/(p-2)} = 8.
  CHECK(tail_split_bound(3.0, 0.5, 2.0, TailRegime::Mid) ==
        doctest::Approx(8.0).epsilon(1e-12));
  // p = 2, r = 0.5, M = 1: the bound collapses to r^2 M^6 = 0.25.
  CHECK(tail_split_bound(2.0, 0.5, 1.0, TailRegime::Subcritical) ==
        doctest::Approx(0.25).epsilon(1e-12));
  // p = infinity, r = 1, M = 1: coefficient 1 + 3 (p-2)/(p+6) -> 4.
  CHECK(tail_split_bound(kInf, 1.0, 1.0, TailRegime::High) ==
        doctest::Approx(4.0).epsilon(1e-12));

  // Exponents per regime.
  CHECK(tail_split_exponent(2.0, TailRegime::Subcritical) ==
        doctest::Approx(6.0));
  CHECK(tail_split_exponent(4.0, TailRegime::Mid) == doctest::Approx(2.0));
  CHECK(tail_split_exponent(kInf, TailRegime::High) == doctest::Approx(1.5));

  // Regime / exponent mismatches are rejected.
  CHECK_THROWS_AS(tail_split_bound(4.0, 1.0, 1.0, TailRegime::Subcritical),
                  ParameterError);
  CHECK_THROWS_AS(tail_split_bound(2.5, 1.0, 1.0, TailRegime::Mid),
                  ParameterError);
  CHECK_THROWS_AS(tail_split_bound(kInf, 1.0, 1.0, TailRegime::Mid),
                  ParameterError);
}

TEST_CASE("tail bounds hold on randomized step series") {
  const TailTrialSummary summary = run_tail_split_trials(17, 300);
  CHECK(summary.violations == 0);
  CHECK(summary.worst_margin >= 1.0);
}
