#include "nssl/morrey.hpp"

#include <cmath>
#include <limits>

#include "nssl/errors.hpp"
#include "nssl/lorentz.hpp"
#include "nssl/quadrature.hpp"

namespace nssl {

MorreyProfile morrey_sup(const SampledField& field, double t, Vec3 x0,
                         double r, double p, bool oscillation) {
  if (!(p >= 2.0)) throw ParameterError("morrey_sup requires p >= 2");
  if (!(r > 0.0)) throw ParameterError("morrey_sup requires r > 0");
  const GridGeometry& geom = field.geometry();
  const double floor_radius = geom.max_spacing();
  if (r < floor_radius)
    throw DomainError("morrey_sup radius below the resolution floor");
  const int k = field.sample_at_or_below(t);

  const double* u1 = field.component_data(0, k);
  const double* u2 = field.component_data(1, k);
  const double* u3 = field.component_data(2, k);

  MorreyProfile profile;
  for (double eta = r; eta >= floor_radius; eta *= 0.5) {
    BallQuadrature quad(geom, BallSpec{x0, eta});
    if (quad.size() == 0 || !(quad.measure() > 0.0)) break;

    Vec3 mean{0.0, 0.0, 0.0};
    if (oscillation) {
      for (std::size_t i = 0; i < quad.size(); ++i) {
        const std::uint32_t n = quad.nodes()[i];
        const double w = quad.weights()[i];
        mean.x += w * u1[n];
        mean.y += w * u2[n];
        mean.z += w * u3[n];
      }
      mean = (1.0 / quad.measure()) * mean;
    }

    double value;
    if (std::isinf(p)) {
      double m = 0.0;
      for (std::size_t i = 0; i < quad.size(); ++i) {
        const std::uint32_t n = quad.nodes()[i];
        const Vec3 d{u1[n] - mean.x, u2[n] - mean.y, u3[n] - mean.z};
        m = std::fmax(m, d.norm());
      }
      value = m;
    } else {
      double acc = 0.0;
      for (std::size_t i = 0; i < quad.size(); ++i) {
        const std::uint32_t n = quad.nodes()[i];
        const Vec3 d{u1[n] - mean.x, u2[n] - mean.y, u3[n] - mean.z};
        acc += quad.weights()[i] * std::pow(d.norm(), p);
      }
      value = std::pow(acc / eta, 1.0 / p);
    }
    profile.radii.push_back(eta);
    profile.values.push_back(value);
    profile.supremum = std::fmax(profile.supremum, value);
  }
  if (profile.radii.empty())
    throw DomainError("no resolvable dyadic radius inside the box");
  return profile;
}

EmbeddingResult embedding_check(const SampledField& field, double t, Vec3 x0,
                                double r, double p) {
  EmbeddingResult res;
  res.lhs = morrey_sup(field, t, x0, r, p, false).supremum;
  const int k = field.sample_at_or_below(t);
  res.rhs = weak_norm(field.speed_slice(k), BallSpec{x0, r}, 1.5 * p);
  if (res.rhs > 0.0) {
    res.ratio = res.lhs / res.rhs;
  } else if (res.lhs > 0.0) {
    res.ratio_infinite = true;
    res.ratio = std::numeric_limits<double>::infinity();
  }
  return res;
}

}  // namespace nssl
