/// @file test_field_core.cpp
/// @brief Fields, geometry, ball quadrature, local means, gradients, NSSF1 I/O.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "helpers.hpp"
#include "nssl/errors.hpp"
#include "nssl/field.hpp"
#include "nssl/quadrature.hpp"
#include "nssl/synth.hpp"

using namespace nssl;
using namespace nssl::testing;

namespace {
constexpr double kPi = 3.14159265358979323846;

ScalarSlice constant_slice(const GridGeometry& geom, double value) {
  ScalarSlice s;
  s.geom = geom;
  s.values.assign(geom.node_count(), value);
  return s;
}
}  // namespace

TEST_CASE("grid geometry spacing and cells") {
  GridGeometry periodic = cube_grid(8, 0.0, 4.0, true);
  CHECK(periodic.hx() == doctest::Approx(0.5));
  GridGeometry capped = cube_grid(9, 0.0, 4.0, false);
  CHECK(capped.hx() == doctest::Approx(0.5));

  // End nodes of non-periodic axes own half cells clipped to the box.
  double lo, hi;
  capped.cell_bounds(0, 0, &lo, &hi);
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(0.25));
  capped.cell_bounds(0, 8, &lo, &hi);
  CHECK(hi == doctest::Approx(4.0));

  // Cells tile the box exactly.
  double total = 0.0;
  for (int i = 0; i < 9; ++i) {
    capped.cell_bounds(0, i, &lo, &hi);
    total += hi - lo;
  }
  CHECK(total == doctest::Approx(4.0));

  CHECK_THROWS_AS(cube_grid(0, 0.0, 1.0, false).validate(), ParameterError);
  CHECK_THROWS_AS(cube_grid(4, 1.0, 1.0, false).validate(), ParameterError);
}

TEST_CASE("ball quadrature measures the ball") {
  const GridGeometry geom = cube_grid(64, -2.0, 2.0, false);
  const BallSpec ball{{0.0, 0.0, 0.0}, 1.0};
  BallQuadrature quad(geom, ball);
  CHECK(quad.measure() ==
        doctest::Approx(4.0 * kPi / 3.0).epsilon(5e-3));

  // Ball centered at a corner of the box: only one octant is covered.
  BallQuadrature corner(geom, BallSpec{{-2.0, -2.0, -2.0}, 1.0});
  CHECK(corner.measure() ==
        doctest::Approx(4.0 * kPi / 3.0 / 8.0).epsilon(2e-2));

  // A disjoint ball yields an empty rule; the integral operations are the
  // ones that reject it.
  BallQuadrature empty(geom, BallSpec{{50.0, 0.0, 0.0}, 1.0});
  CHECK(empty.size() == 0);
  CHECK(empty.measure() == 0.0);
}

TEST_CASE("integrate_ball on constants and the radial profile") {
  const GridGeometry geom = cube_grid(64, -2.0, 2.0, false);
  const BallSpec ball{{0.0, 0.0, 0.0}, 1.0};

  SUBCASE("f = 1, p = 3 gives the ball volume") {
    const double v = integrate_ball(constant_slice(geom, 1.0), ball, 3.0);
    CHECK(v == doctest::Approx(4.0 * kPi / 3.0).epsilon(5e-3));
  }
  SUBCASE("f = 0 gives 0 for any p") {
    for (double p : {1.0, 2.0, 7.5})
      CHECK(integrate_ball(constant_slice(geom, 0.0), ball, p) == 0.0);
  }
  SUBCASE("p = infinity is the essential sup") {
    ScalarSlice s = constant_slice(geom, 1.0);
    s.values[geom.index(32, 32, 32)] = -9.0;
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(integrate_ball(s, ball, inf) == doctest::Approx(9.0));
  }
  SUBCASE("p < 1 is rejected, ball outside the box is rejected") {
    CHECK_THROWS_AS(integrate_ball(constant_slice(geom, 1.0), ball, 0.5),
                    ParameterError);
    CHECK_THROWS_AS(integrate_ball(constant_slice(geom, 1.0),
                                   BallSpec{{9.0, 9.0, 9.0}, 0.5}, 2.0),
                    DomainError);
  }
}

TEST_CASE("integrate_ball converges on 1/|x|^2") {
  // No node sits at the origin for even n on [-2,2]. Analytic value over B_1
  // of |x|^{-2} is 4 pi; error should shrink under 2x refinement.
  std::vector<double> errors;
  for (int n : {24, 48, 96}) {
    const GridGeometry geom = cube_grid(n, -2.0, 2.0, false);
    ScalarSlice s;
    s.geom = geom;
    s.values.resize(geom.node_count());
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
          s.values[geom.index(ix, iy, iz)] =
              1.0 / geom.node(ix, iy, iz).norm();
    const double v =
        integrate_ball(s, BallSpec{{0.0, 0.0, 0.0}, 1.0}, 2.0);
    errors.push_back(std::fabs(v - 4.0 * kPi));
  }
  CHECK(errors[1] < errors[0]);
  CHECK(errors[2] < errors[1]);
  CHECK(errors[2] < 0.03 * 4.0 * kPi);
}

TEST_CASE("local_mean on constants, odd fields, and the Beltrami flow") {
  const GridGeometry geom = cube_grid(48, -kPi, kPi, true);
  const BallSpec ball{{0.0, 0.0, 0.0}, 1.0};

  SUBCASE("constant field is reproduced exactly") {
    const SampledField f = analytic_field(
        geom, 0.0, 1.0, 2, [](double, Vec3) { return Vec3{2.0, -1.0, 0.5}; });
    const Vec3 m = local_mean(f, 0.0, ball);
    CHECK(m.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.y == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(m.z == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("odd field about the center averages to zero") {
    const SampledField f = analytic_field(geom, 0.0, 1.0, 2, [](double, Vec3 x) {
      return Vec3{x.x * x.x * x.x, std::sin(x.y), x.z};
    });
    const Vec3 m = local_mean(f, 0.0, ball);
    CHECK(std::fabs(m.x) < 1e-10);
    CHECK(std::fabs(m.y) < 1e-10);
    CHECK(std::fabs(m.z) < 1e-10);
  }
  SUBCASE("Beltrami mean over B_1(0) matches the analytic integral") {
    // Each component integrates to 4 pi (sin 1 - cos 1) over B_1, so the
    // mean is 3 (sin 1 - cos 1) = 0.903506...
    GeneratorSpec spec = beltrami_spec(48, 2, 0.5);
    spec.grid = cube_grid(48, -kPi, kPi, true);
    const SampledField f = generate(spec);
    const double expected = 3.0 * (std::sin(1.0) - std::cos(1.0));
    const Vec3 m = local_mean(f, 0.0, ball);
    CHECK(m.x == doctest::Approx(expected).epsilon(5e-3));
    CHECK(m.y == doctest::Approx(expected).epsilon(5e-3));
    CHECK(m.z == doctest::Approx(expected).epsilon(5e-3));
  }
}

TEST_CASE("gradient lattice on constant, shear, and Beltrami fields") {
  SUBCASE("constant field has zero gradient everywhere") {
    const GridGeometry geom = cube_grid(12, 0.0, 1.0, false);
    const SampledField f = analytic_field(
        geom, 0.0, 1.0, 2, [](double, Vec3) { return Vec3{3.0, 2.0, 1.0}; });
    const ScalarSlice g = gradient_squared(f, 0.0);
    for (double v : g.values) CHECK(v == 0.0);
  }
  SUBCASE("linear shear is differentiated exactly, boundaries included") {
    const double a = 1.75;
    const GridGeometry geom = cube_grid(9, 0.0, 2.0, false);
    const SampledField f = analytic_field(
        geom, 0.0, 1.0, 2, [a](double, Vec3 x) { return Vec3{a * x.x, 0.0, 0.0}; });
    const ScalarSlice g = gradient_squared(f, 0.0);
    for (double v : g.values) CHECK(v == doctest::Approx(a * a).epsilon(1e-12));
  }
  SUBCASE("Beltrami enstrophy integral matches 3 (2 pi)^3") {
    GeneratorSpec spec = beltrami_spec(48, 2, 0.5);
    const SampledField f = generate(spec);
    const ScalarSlice g = gradient_squared(f, 0.0);
    double total = 0.0;
    for (double v : g.values) total += v;
    total *= f.geometry().cell_volume();
    CHECK(total == doctest::Approx(3.0 * std::pow(2.0 * kPi, 3)).epsilon(2e-2));
  }
}

TEST_CASE("time sampling snaps to the lattice") {
  const GridGeometry geom = cube_grid(4, 0.0, 1.0, false);
  SampledField f(geom, 0.0, 1.0, 5, false);
  CHECK(f.dt() == doctest::Approx(0.25));
  CHECK(f.sample_at_or_below(0.25) == 1);
  CHECK(f.sample_at_or_below(0.25 - 1e-13) == 1);  // snapped, not floored
  CHECK(f.sample_at_or_below(0.26) == 1);
  CHECK(f.sample_at_or_below(1.0) == 4);
  CHECK(f.covers_time(1.0 + 1e-13));
  CHECK(!f.covers_time(1.1));
  CHECK_THROWS_AS((void)f.sample_at_or_below(-0.5), DomainError);
}

TEST_CASE("field validation rejects bad shapes and non-finite values") {
  const GridGeometry geom = cube_grid(4, 0.0, 1.0, false);
  CHECK_THROWS_AS(SampledField(geom, 0.0, 1.0, 1, false), ParameterError);
  CHECK_THROWS_AS(SampledField(geom, 1.0, 1.0, 3, false), ParameterError);

  SampledField f(geom, 0.0, 1.0, 2, false);
  f.u(1, 0, 7) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(f.validate(), DomainError);
}

TEST_CASE("NSSF1 round trip preserves every byte of state") {
  GeneratorSpec spec = random_divfree_spec(12, 99, 3);
  spec.with_pressure = true;
  const SampledField f = generate(spec);
  const std::string path = "roundtrip_test.nssf";
  save_field(f, path);
  const SampledField g = load_field(path);

  REQUIRE(g.nt() == f.nt());
  REQUIRE(g.has_pressure());
  CHECK(g.geometry().periodic == f.geometry().periodic);
  CHECK(g.t_begin() == f.t_begin());
  CHECK(g.t_end() == f.t_end());
  const std::size_t nnode = f.geometry().node_count();
  for (int k = 0; k < f.nt(); ++k) {
    for (int c = 0; c < 3; ++c)
      for (std::size_t n = 0; n < nnode; ++n)
        REQUIRE(g.u(c, k, n) == f.u(c, k, n));
    for (std::size_t n = 0; n < nnode; ++n)
      REQUIRE(g.p(k, n) == f.p(k, n));
  }
  std::remove(path.c_str());
}

TEST_CASE("NSSF1 loader reports the offending byte") {
  const GridGeometry geom = cube_grid(3, 0.0, 1.0, false);
  const SampledField f = analytic_field(
      geom, 0.0, 1.0, 2, [](double, Vec3) { return Vec3{1.0, 0.0, 0.0}; });
  const std::string path = "format_test.nssf";
  save_field(f, path);

  auto corrupt = [&](std::size_t offset, char byte) {
    std::fstream io(path,
                    std::ios::in | std::ios::out | std::ios::binary);
    io.seekp(static_cast<std::streamoff>(offset));
    io.write(&byte, 1);
  };

  SUBCASE("bad magic points at offset 0") {
    corrupt(0, 'X');
    try {
      load_field(path);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.byte_offset() == 0);
    }
  }
  SUBCASE("bad version points at offset 4") {
    corrupt(4, 9);
    try {
      load_field(path);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.byte_offset() == 4);
    }
  }
  SUBCASE("stray flag bits point at offset 5") {
    corrupt(5, 0x40);
    try {
      load_field(path);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.byte_offset() == 5);
    }
  }
  SUBCASE("truncated payload reports a size mismatch") {
    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    in.close();
    bytes.resize(bytes.size() - 8);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    CHECK_THROWS_AS(load_field(path), FormatError);
  }
  std::remove(path.c_str());
}
