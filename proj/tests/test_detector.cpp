/// @file test_detector.cpp
/// @brief Regularity criteria, decay relation, iteration, concentration.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "json.hpp"

#include "helpers.hpp"
#include "nssl/detector.hpp"
#include "nssl/errors.hpp"
#include "nssl/morrey.hpp"
#include "nssl/synth.hpp"

using namespace nssl;
using namespace nssl::testing;

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();
const Vec3 kOrigin{0.0, 0.0, 0.0};

InvariantReport make_report(double A, double B, double C, double D) {
  InvariantReport rep;
  rep.A = A;
  rep.B = B;
  rep.C = C;
  rep.D = D;
  rep.has_D = true;
  return rep;
}
}  // namespace

TEST_CASE("decay relation closed forms") {
  SUBCASE("p = 3 with unit inputs") {
    const InvariantReport rep = make_report(1.0, 0.0, 1.0, 0.0);
    CHECK(c_decay_rhs(3.0, 0.5, 1.0, rep, 1.0, 1.0) ==
          doctest::Approx(2.5).epsilon(1e-12));
  }
  SUBCASE("p = 2 exercises the gradient branch") {
    const InvariantReport rep = make_report(0.0, 16.0, 0.0, 0.0);
    // (rho/r)^2 B^{3/4} M^{3/2} with rho/r = 2, B = 16, M = 1.
    CHECK(c_decay_rhs(2.0, 0.5, 1.0, rep, 1.0, 1.0) ==
          doctest::Approx(32.0).epsilon(1e-12));
  }
  SUBCASE("p = infinity with A = 0 keeps only the carry-over term") {
    const InvariantReport rep = make_report(0.0, 5.0, 0.7, 0.0);
    CHECK(c_decay_rhs(kInf, 0.25, 1.0, rep, 2.0, 3.0) ==
          doctest::Approx(3.0 * 0.25 * 0.7).epsilon(1e-12));
  }
  SUBCASE("monotone in the hypothesis norm and the carried quantity") {
    const InvariantReport rep = make_report(0.9, 1.1, 0.5, 0.0);
    for (double p : {2.5, 4.0, 8.0}) {
      const double lo = c_decay_rhs(p, 0.25, 1.0, rep, 0.5, 2.0);
      const double hi = c_decay_rhs(p, 0.25, 1.0, rep, 1.5, 2.0);
      CHECK(lo < hi);
      InvariantReport more = rep;
      more.C = 1.5;
      CHECK(c_decay_rhs(p, 0.25, 1.0, rep, 0.5, 2.0) <
            c_decay_rhs(p, 0.25, 1.0, more, 0.5, 2.0));
    }
  }
  SUBCASE("parameter guards") {
    const InvariantReport rep = make_report(1.0, 1.0, 1.0, 1.0);
    CHECK_THROWS_AS(c_decay_rhs(1.5, 0.5, 1.0, rep, 1.0, 1.0),
                    ParameterError);
    CHECK_THROWS_AS(c_decay_rhs(3.0, 1.0, 1.0, rep, 1.0, 1.0),
                    ParameterError);
    CHECK_THROWS_AS(c_decay_rhs(3.0, 2.0, 1.0, rep, 1.0, 1.0),
                    ParameterError);
  }
}

TEST_CASE("iteration quantity assembles the four invariants") {
  const InvariantReport rep = make_report(1.0, 2.0, 8.0, 16.0);
  CHECK(g_value(rep) ==
        doctest::Approx(1.0 + 2.0 + std::pow(8.0, 7.0 / 6.0) +
                        std::pow(16.0, 8.0 / 7.0))
            .epsilon(1e-14));
}

TEST_CASE("decay iteration") {
  SUBCASE("no forcing decays geometrically") {
    const IterationState st = iterate_decay(5.0, 2.0, 0.0, 12);
    CHECK(st.theta == doctest::Approx(1.0 / 128.0).epsilon(1e-15));
    REQUIRE(st.g_sequence.size() == 13);
    double expect = 5.0;
    for (std::size_t k = 0; k < st.g_sequence.size(); ++k) {
      CHECK(st.g_sequence[k] == doctest::Approx(expect).epsilon(1e-15));
      expect /= 128.0;
    }
    CHECK(st.bound_satisfied);
    // The band collapses to zero without forcing, so it is never entered.
    CHECK(st.first_k_in_band == -1);
  }
  SUBCASE("zero start grows monotonically to the fixed point") {
    const IterationState st = iterate_decay(0.0, 1.0, 2.0, 20);
    CHECK(st.theta == doctest::Approx(0.5));
    for (std::size_t k = 1; k < st.g_sequence.size(); ++k) {
      CHECK(st.g_sequence[k] > st.g_sequence[k - 1]);
      const double closed = 2.0 * (1.0 - std::pow(0.5, k)) / 0.5;
      CHECK(st.g_sequence[k] == doctest::Approx(closed).epsilon(1e-13));
    }
    CHECK(st.bound_satisfied);
    CHECK(st.first_k_in_band == 0);
  }
  SUBCASE("the large-start example enters the band at step two") {
    const IterationState st = iterate_decay(1000.0, 2.0, 1.0, 8);
    CHECK(st.g_sequence[1] == doctest::Approx(8.8125).epsilon(1e-13));
    CHECK(st.first_k_in_band == 2);
    CHECK(st.bound_satisfied);
  }
  SUBCASE("parameter guards") {
    CHECK_THROWS_AS(iterate_decay(-1.0, 2.0, 1.0, 4), ParameterError);
    CHECK_THROWS_AS(iterate_decay(1.0, 0.5, 1.0, 4), ParameterError);
    CHECK_THROWS_AS(iterate_decay(1.0, 2.0, -1.0, 4), ParameterError);
    CHECK_THROWS_AS(iterate_decay(1.0, 2.0, 1.0, -1), ParameterError);
  }
}

TEST_CASE("time norm of the profile series") {
  const GridGeometry geom = cube_grid(12, -1.0, 1.0, false);
  const SampledField field = random_field(geom, 31, 9);
  const double t0 = 1.0, r = 0.8;

  // p = 2 pairs with q = infinity: the norm is the largest profile supremum
  // among the window samples.
  double expect = 0.0;
  for (int k = 0; k < field.nt(); ++k) {
    const double t = field.time(k);
    if (t < t0 - r * r - 1e-12 || t > t0 + 1e-12) continue;
    expect = std::fmax(
        expect, morrey_sup(field, t, kOrigin, r, 2.0, false).supremum);
  }
  CHECK(morrey_time_norm(field, t0, kOrigin, 2.0, false, r) ==
        doctest::Approx(expect).epsilon(1e-12));

  // Homogeneous of degree 1 in the amplitude.
  SampledField scaled = field;
  for (int comp = 0; comp < 3; ++comp)
    for (int k = 0; k < scaled.nt(); ++k)
      for (std::size_t n = 0; n < geom.node_count(); ++n)
        scaled.u(comp, k, n) *= 3.0;
  for (double p : {2.0, 3.0, kInf})
    CHECK(morrey_time_norm(scaled, t0, kOrigin, p, true, r) ==
          doctest::Approx(3.0 * morrey_time_norm(field, t0, kOrigin, p, true,
                                                 r))
              .epsilon(1e-12));

  // Window coverage and sample-count guards.
  CHECK_THROWS_AS(morrey_time_norm(field, 0.2, kOrigin, 2.0, false, 0.8),
                  DomainError);
  CHECK_THROWS_AS(
      morrey_time_norm(field, 1.0, Vec3{0.9, 0.0, 0.0}, 2.0, false, 0.8),
      DomainError);
  CHECK_THROWS_AS(morrey_time_norm(field, 1.0, kOrigin, 1.5, false, 0.8),
                  ParameterError);
}

TEST_CASE("epsilon regularity on the zero field") {
  const GridGeometry geom = cube_grid(12, -1.0, 1.0, false);
  const SampledField field = analytic_field(
      geom, 0.0, 1.0, 9, [](double, Vec3) { return Vec3{0, 0, 0}; });
  const DetectorConfig config;
  for (double p : {2.0, 3.0, 6.0, kInf}) {
    for (bool osc : {false, true}) {
      const DetectionVerdict v =
          epsilon_regularity(field, 1.0, kOrigin, p, osc, config, 0.8);
      CHECK(v.verdict == Verdict::RegularIndicated);
      CHECK(v.measured == 0.0);
      CHECK(v.threshold == config.delta);
      CHECK_FALSE(v.trace.empty());
      CHECK(v.criterion == (osc ? Criterion::EpsRegularityOscillation
                                : Criterion::EpsRegularityPlain));
    }
  }
}

TEST_CASE("regularity is never indicated above the gate norm") {
  const GridGeometry geom = cube_grid(10, -1.0, 1.0, false);
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double ps[] = {2.0, 2.5, 3.0, 4.0, 6.0, kInf};
  int indicated = 0, above = 0;
  for (int trial = 0; trial < 300; ++trial) {
    SampledField field = random_field(geom, 9000 + trial, 7);
    // Log-uniform amplitudes so both small and large fields appear.
    const double amp = std::pow(10.0, -3.0 + 3.0 * uni(rng));
    for (int comp = 0; comp < 3; ++comp)
      for (int k = 0; k < field.nt(); ++k)
        for (std::size_t n = 0; n < geom.node_count(); ++n)
          field.u(comp, k, n) *= amp;
    DetectorConfig config;
    config.delta = std::pow(10.0, -6.0 + 7.0 * uni(rng));
    const double p = ps[rng() % 6];
    const bool osc = (rng() & 1) != 0;
    const DetectionVerdict v =
        epsilon_regularity(field, 1.0, kOrigin, p, osc, config, 0.8);
    if (v.verdict == Verdict::RegularIndicated) {
      ++indicated;
      CHECK(v.measured <= config.delta);
    }
    if (v.measured > config.delta) {
      ++above;
      CHECK(v.verdict != Verdict::RegularIndicated);
    }
  }
  // The sweep must exercise both sides of the gate to mean anything.
  CHECK(indicated > 20);
  CHECK(above > 20);
}

TEST_CASE("epsilon regularity separates small exact solutions from blowup") {
  SUBCASE("a tiny decaying solution is regular at the defaults") {
    const SampledField field = generate(beltrami_spec(32, 17, 0.5, 7e-4));
    const DetectorConfig config;
    for (double p : {2.0, 3.0}) {
      const DetectionVerdict v = epsilon_regularity(
          field, 0.5, Vec3{kPi, kPi, kPi}, p, true, config, 0.7);
      CHECK(v.verdict == Verdict::RegularIndicated);
    }
  }
  SUBCASE("the shrinking swirl is never declared regular at its focus") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::LeraySelfSimilar;
    spec.grid = cube_grid(33, -1.0, 1.0, false);
    spec.blowup_time = 1.0;
    spec.t_begin = 0.5;
    spec.t_end = 0.9375;
    spec.nt = 16;
    const SampledField field = generate(spec);
    const DetectorConfig config;
    for (double p : {2.0, 3.0, kInf}) {
      const DetectionVerdict v = epsilon_regularity(
          field, 0.9375, kOrigin, p, false, config, 0.6);
      CHECK(v.verdict != Verdict::RegularIndicated);
      CHECK(v.measured > v.threshold);
    }
  }
}

TEST_CASE("threshold criterion at q = p = 3 matches the cylinder quantity") {
  const GridGeometry geom = cube_grid(24, -1.0, 1.0, false);
  const DetectorConfig config;
  bool saw_small = false, saw_large = false;
  for (double amp : {0.05, 0.3}) {
    const SampledField field = analytic_field(
        geom, 0.0, 1.0, 9,
        [&](double, Vec3) { return Vec3{amp, 0.0, 0.0}; });
    const DetectionVerdict v =
        wolf_criterion(field, 1.0, kOrigin, 0.5, 3.0, 3.0, config);
    const double c3 = c_quantity(field, CylinderSpec{1.0, kOrigin, 0.5});
    const bool small = std::cbrt(c3) <= config.resolved_wolf_eps();
    CHECK((v.verdict == Verdict::RegularIndicated) == small);
    CHECK((v.measured <= v.threshold) == small);
    saw_small = saw_small || small;
    saw_large = saw_large || !small;
  }
  CHECK(saw_small);
  CHECK(saw_large);
  const SampledField field = random_field(geom, 8, 9);
  CHECK_THROWS_AS(wolf_criterion(field, 1.0, kOrigin, 0.5, 2.5, 3.0, config),
                  ParameterError);
  CHECK_THROWS_AS(wolf_criterion(field, 1.0, kOrigin, 0.5, 3.0, 2.5, config),
                  ParameterError);
}

TEST_CASE("concentration rate test") {
  const DetectorConfig config;
  SUBCASE("zero field is inconclusive with a zero proxy") {
    const GridGeometry geom = cube_grid(12, -1.0, 1.0, false);
    const SampledField field = analytic_field(
        geom, 0.0, 1.0, 9, [](double, Vec3) { return Vec3{0, 0, 0}; });
    const DetectionVerdict v =
        concentration_rate(field, 1.0, kOrigin, 0.5, 4.0, 2.0, config);
    CHECK(v.verdict == Verdict::Inconclusive);
    CHECK(v.measured == 0.0);
    CHECK(v.threshold == doctest::Approx(config.resolved_delta_star()));
    CHECK_FALSE(v.series.empty());
  }
  SUBCASE("proxy is homogeneous of degree 1") {
    const GridGeometry geom = cube_grid(12, -1.0, 1.0, false);
    const SampledField field = random_field(geom, 55, 9);
    SampledField scaled = field;
    for (int comp = 0; comp < 3; ++comp)
      for (int k = 0; k < scaled.nt(); ++k)
        for (std::size_t n = 0; n < geom.node_count(); ++n)
          scaled.u(comp, k, n) *= 3.0;
    for (double p : {4.0, 6.0, kInf}) {
      const double base =
          concentration_rate(field, 1.0, kOrigin, 0.5, p, 2.5, config)
              .measured;
      const double big =
          concentration_rate(scaled, 1.0, kOrigin, 0.5, p, 2.5, config)
              .measured;
      CHECK(big == doctest::Approx(3.0 * base).epsilon(1e-12));
    }
  }
  SUBCASE("the shrinking swirl concentrates at its blowup point") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::LeraySelfSimilar;
    spec.grid = cube_grid(33, -1.0, 1.0, false);
    spec.blowup_time = 1.0;
    spec.t_begin = 0.5;
    spec.t_end = 0.9375;
    spec.nt = 16;
    const SampledField field = generate(spec);
    const DetectionVerdict v =
        concentration_rate(field, 1.0, kOrigin, 0.5, kInf, 2.0, config);
    CHECK(v.verdict == Verdict::ConcentrationDetected);
    CHECK(v.measured > 10.0 * config.resolved_delta_star());
    CHECK(v.series.size() >= 4);
  }
  SUBCASE("a small decaying solution never concentrates") {
    const SampledField field = generate(beltrami_spec(24, 17, 0.5, 7e-4));
    for (double nu : {2.0, 2.5}) {
      const DetectionVerdict v = concentration_rate(
          field, 0.5, Vec3{kPi, kPi, kPi}, 0.5, 4.0, nu, config);
      CHECK(v.verdict == Verdict::Inconclusive);
    }
  }
  SUBCASE("parameter and sample guards") {
    const GridGeometry geom = cube_grid(10, -1.0, 1.0, false);
    const SampledField field = random_field(geom, 2, 9);
    CHECK_THROWS_AS(
        concentration_rate(field, 1.0, kOrigin, 0.5, 3.0, 2.0, config),
        ParameterError);
    CHECK_THROWS_AS(
        concentration_rate(field, 1.0, kOrigin, 0.5, 4.0, 2.8, config),
        ParameterError);
    CHECK_THROWS_AS(
        concentration_rate(field, 1.0, kOrigin, 0.5, 4.0, 1.5, config),
        ParameterError);
    const SampledField coarse = random_field(geom, 2, 4);
    CHECK_THROWS_AS(
        concentration_rate(coarse, 0.5, kOrigin, 0.5, 4.0, 2.0, config),
        DomainError);
  }
}

TEST_CASE("borderline concentration test") {
  const DetectorConfig config;
  SUBCASE("constants have no oscillation") {
    const GridGeometry geom = cube_grid(16, -1.0, 1.0, false);
    const SampledField field = analytic_field(
        geom, 0.0, 1.0, 9, [](double, Vec3) { return Vec3{0.7, -0.1, 0.2}; });
    const DetectionVerdict v =
        concentration_p3(field, 1.0, kOrigin, 0.6, config);
    CHECK(v.verdict == Verdict::Inconclusive);
    CHECK(v.measured <= 1e-10);
    bool has_osc_key = false;
    for (const auto& kv : v.trace)
      if (kv.first == "osc_sup_p2") has_osc_key = true;
    CHECK(has_osc_key);
  }
  SUBCASE("the radial profile oscillates at every scale") {
    GeneratorSpec spec = radial_spec(48);
    spec.nt = 9;
    const SampledField field = generate(spec);
    const DetectionVerdict v =
        concentration_p3(field, 1.0, Vec3{kPi, kPi, kPi}, 0.8, config);
    CHECK(v.measured > 0.1);
  }
}

TEST_CASE("config resolution and serialization") {
  SUBCASE("defaults") {
    const DetectorConfig config;
    CHECK(config.resolved_delta_star() ==
          doctest::Approx(config.delta / C_EMB_CALIBRATED).epsilon(1e-15));
    CHECK(config.resolved_wolf_eps() ==
          doctest::Approx(std::cbrt(config.eps_star)).epsilon(1e-15));
    CHECK(config.resolved_c_cal() == C_CAL_CALIBRATED);
  }
  SUBCASE("explicit values pass through") {
    DetectorConfig config;
    config.delta_star = 0.123;
    config.wolf_eps = 0.456;
    config.c_cal = 7.0;
    CHECK(config.resolved_delta_star() == 0.123);
    CHECK(config.resolved_wolf_eps() == 0.456);
    CHECK(config.resolved_c_cal() == 7.0);
  }
  SUBCASE("verdict JSON parses with the expected fields") {
    const GridGeometry geom = cube_grid(12, -1.0, 1.0, false);
    const SampledField field = random_field(geom, 12, 9);
    const DetectorConfig config;
    const DetectionVerdict v =
        concentration_rate(field, 1.0, kOrigin, 0.5, 4.0, 2.0, config);
    const nlohmann::json j = nlohmann::json::parse(v.to_json("abc123"));
    CHECK(j.at("criterion").get<std::string>() == "concentration_general");
    CHECK(j.at("verdict").is_string());
    CHECK(j.at("t0").get<double>() == doctest::Approx(1.0));
    CHECK(j.at("x0").size() == 3);
    CHECK(j.at("p").get<double>() == doctest::Approx(4.0));
    CHECK(j.at("nu").get<double>() == doctest::Approx(2.0));
    CHECK(j.at("measured").is_number());
    CHECK(j.at("threshold").is_number());
    CHECK(j.at("trace").is_array());
    CHECK_FALSE(j.at("trace").empty());
    CHECK(j.at("series").is_array());
    CHECK(j.at("config_hash").get<std::string>() == "abc123");

    const nlohmann::json bare = nlohmann::json::parse(v.to_json());
    CHECK_FALSE(bare.contains("config_hash"));
  }
}
