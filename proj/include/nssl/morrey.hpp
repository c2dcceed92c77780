/// @file morrey.hpp
/// @brief Morrey-type suprema over shrinking balls and the weak-norm
///        embedding check.
#pragma once

#include <vector>

#include "nssl/field.hpp"

namespace nssl {

/// Values of the bracket (eta^{-1} integral_{B_eta} |.|^p)^{1/p} at dyadic
/// radii eta_j = r * 2^{-j}, largest first, with their supremum.
struct MorreyProfile {
  std::vector<double> radii;
  std::vector<double> values;
  double supremum = 0.0;
};

/// Supremum over dyadic radii of the Morrey bracket at time t, centered at
/// x0. With oscillation = true the integrand is |u - u_mean(eta)| with the
/// ball mean recomputed per radius; otherwise it is |u|. p = infinity turns
/// the bracket into the essential sup over the ball. Radii below the
/// resolution floor (ball diameter under two cells) are excluded from the
/// sup, not extrapolated; r itself below the floor is a DomainError.
MorreyProfile morrey_sup(const SampledField& field, double t, Vec3 x0,
                         double r, double p, bool oscillation);

/// Both sides of the embedding of the weak Lebesgue ball norm into the
/// Morrey supremum: lhs = morrey_sup (plain), rhs = weak L^{3p/2} norm of
/// |u| on B_r. ratio = lhs / rhs; a zero rhs with nonzero lhs is flagged.
struct EmbeddingResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool ratio_infinite = false;
};

EmbeddingResult embedding_check(const SampledField& field, double t, Vec3 x0,
                                double r, double p);

}  // namespace nssl
