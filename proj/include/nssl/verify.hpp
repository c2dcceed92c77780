/// @file verify.hpp
/// @brief Measured-constant suite: embedding ratios, tail-split trials,
///        energy residuals, scaling invariance, decay ratios, refinement
///        checks. Backs the CLI `verify` subcommand and the calibration of
///        the frozen constants.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nssl {

/// Largest Morrey-sup / weak-norm ratio over a seeded random corpus, plus
/// the closed-form radial profile's p = 2 ratio.
struct EmbeddingSweep {
  double max_ratio = 0.0;
  double radial_p2_ratio = 0.0;
  int trials = 0;
};

EmbeddingSweep measure_embedding_constant(std::uint64_t seed, int trials,
                                          int grid, int radial_grid);

/// Randomized step time series checked against the closed-form tail bound.
/// worst_margin is the smallest bound/integral ratio seen (>= 1 means the
/// bound held everywhere).
struct TailTrialSummary {
  int trials = 0;
  int violations = 0;
  double worst_margin = 0.0;
};

TailTrialSummary run_tail_split_trials(std::uint64_t seed, int trials);

/// Local energy residuals on the decaying exact solution (should sit at zero
/// within quadrature error) and on its amplitude-growing distortion (should
/// be decisively negative). Residuals come with their cylinder energy scale.
struct ResidualSummary {
  double exact_residual = 0.0;
  double exact_scale = 0.0;
  double control_residual = 0.0;
  double control_scale = 0.0;
};

ResidualSummary measure_energy_residuals(int grid, int nt);

/// Worst relative drift of A, B, C, D under parabolic rescaling with
/// lambda in {2, 4}.
struct ScalingSummary {
  double worst_rel_error = 0.0;
};

ScalingSummary measure_scaling_invariance(int grid, int nt);

/// Largest measured C(u, r) / rhs ratio of the decay relation at unit
/// calibration constant, over a mixed corpus, scale pairs, and exponents.
struct DecaySummary {
  double max_ratio = 0.0;
  int cases = 0;
};

DecaySummary measure_decay_constant(std::uint64_t seed, int trials, int grid);

/// Max finite-difference heat-operator residual of the test function inside
/// the region where its cutoff is identically one, on a sequence of 2x
/// refinements. ratios[i] = residuals[i] / residuals[i+1]; second order means
/// ratios near 4.
struct CaloricSummary {
  std::vector<double> residuals;
  std::vector<double> ratios;
};

CaloricSummary caloric_refinement_ratios(int base_n, int levels);

/// Worst relative gap between min over constants of the ball variance and
/// the variance about the ball mean, over seeded random fields (the
/// mean-minimizes-variance identity).
struct VarianceIdentitySummary {
  double worst_rel_gap = 0.0;
  int trials = 0;
};

VarianceIdentitySummary measure_variance_identity(std::uint64_t seed,
                                                  int trials, int grid);

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::string to_text() const;
  std::string to_json() const;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  int embedding_trials = 60;
  int tail_trials = 400;
  int variance_trials = 50;
  int decay_trials = 12;
  int grid = 32;
  int radial_grid = 96;
  int residual_grid = 48;
};

VerifyReport run_verification(const VerifyOptions& opts);

}  // namespace nssl
