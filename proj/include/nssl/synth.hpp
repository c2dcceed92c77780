/// @file synth.hpp
/// @brief Synthetic field generators with exact identities for testing.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nssl/field.hpp"

namespace nssl {

enum class GeneratorKind {
  Constant,
  BeltramiAbc,
  InverseRadial,
  LeraySelfSimilar,
  RandomDivFree,
};

std::string to_string(GeneratorKind k);
GeneratorKind generator_kind_from_string(const std::string& s);

/// Grid plus per-kind parameters. Parsed from / serialized to JSON by the
/// CLI (see from_json_string / to_json_string).
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Constant;

  GridGeometry grid;
  double t_begin = 0.0;
  double t_end = 1.0;
  int nt = 2;

  // constant
  Vec3 value{0.0, 0.0, 0.0};
  bool with_pressure = false;
  double pressure_value = 0.0;

  // beltrami_abc: u = e^{-t} (A sin x3 + C cos x2,
  //                           B sin x1 + A cos x3,
  //                           C sin x2 + B cos x1),
  // P = -|u|^2/2 corrected to zero mean. Exact solution on a fully periodic
  // box whose extents are multiples of 2 pi.
  double abc_a = 1.0, abc_b = 1.0, abc_c = 1.0;

  // inverse_radial: |u| = c / |x - center| pointing radially, static in time.
  // Near the center, values follow the measure-rank regularization (see
  // generate() notes); the field is not divergence-free and is flagged so.
  double radial_c = 1.0;
  Vec3 center{0.0, 0.0, 0.0};

  // leray_selfsimilar: u(t,x) = (2a(T-t))^{-1/2} U(y),
  // y = (x - center)/sqrt(2a(T-t)), with U a compactly supported
  // divergence-free swirl bump. Requires blowup_time > t_end.
  double leray_a = 0.5;
  double blowup_time = 1.0;
  double amplitude = 1.0;

  // random_divfree: seeded Fourier synthesis, Leray-projected so the
  // divergence vanishes spectrally; energy spectrum ~ |k|^slope up to
  // kmax_frac * (n/2) in integer modes; rms normalized to amplitude.
  std::uint64_t seed = 1;
  double slope = -5.0 / 3.0;
  double kmax_frac = 0.66;

  static GeneratorSpec from_json_string(const std::string& text);
  std::string to_json_string() const;
};

/// Builds the field. Deterministic: identical spec (including seed) gives a
/// bit-identical field.
SampledField generate(const GeneratorSpec& spec);

/// Both sides of the global energy balance d/dt (1/2) integral |u|^2 =
/// -integral |grad u|^2 for a generated Beltrami field, evaluated discretely
/// at the interior time samples: the left side by centered differences of
/// the lattice energy, the right side by spectral differentiation. Errors on
/// any other generator kind.
struct EnergyBalanceSample {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

std::vector<EnergyBalanceSample> exact_energy_identity(
    const GeneratorSpec& spec, const SampledField& field);

/// Multiplies the velocity by ((T - t_begin)/(T - t))^{1/2} and the pressure
/// by its square: an amplitude-growing non-solution used as a negative
/// control for the energy residual. Requires T > t_end.
SampledField with_blowup_factor(const SampledField& field, double T);

}  // namespace nssl
