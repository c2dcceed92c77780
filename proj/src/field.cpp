#include "nssl/field.hpp"

#include <cmath>

#include "nssl/errors.hpp"

namespace nssl {

SampledField::SampledField(GridGeometry geom, double t_begin, double t_end,
                           int nt, bool with_pressure)
    : geom_(geom), t_begin_(t_begin), t_end_(t_end), nt_(nt) {
  geom_.validate();
  if (nt_ < 2) throw ParameterError("a field needs at least 2 time samples");
  if (!(t_end_ > t_begin_))
    throw ParameterError("field time interval must have positive length");
  nnode_ = geom_.node_count();
  velocity_.assign(static_cast<std::size_t>(nt_) * 3 * nnode_, 0.0);
  if (with_pressure)
    pressure_.assign(static_cast<std::size_t>(nt_) * nnode_, 0.0);
}

int SampledField::sample_at_or_below(double t) const {
  const double pos = (t - t_begin_) / dt();
  // Snap near-exact hits so rescaled sample times land on their images.
  int k = static_cast<int>(std::floor(pos + 1e-9 * std::fmax(1.0, std::fabs(pos))));
  if (k < 0 || pos < -1e-9) throw DomainError("query time below sampled interval");
  if (k > nt_ - 1) {
    if (pos > (nt_ - 1) + 1e-9)
      throw DomainError("query time above sampled interval");
    k = nt_ - 1;
  }
  return k;
}

bool SampledField::covers_time(double t) const {
  const double snap = 1e-9 * (t_end_ - t_begin_);
  return t >= t_begin_ - snap && t <= t_end_ + snap;
}

ScalarSlice SampledField::component_slice(int comp, int k) const {
  ScalarSlice s{geom_, {}};
  const double* src = component_data(comp, k);
  s.values.assign(src, src + nnode_);
  return s;
}

ScalarSlice SampledField::speed_slice(int k) const {
  ScalarSlice s{geom_, std::vector<double>(nnode_)};
  const double* u1 = component_data(0, k);
  const double* u2 = component_data(1, k);
  const double* u3 = component_data(2, k);
  for (std::size_t i = 0; i < nnode_; ++i)
    s.values[i] = std::sqrt(u1[i] * u1[i] + u2[i] * u2[i] + u3[i] * u3[i]);
  return s;
}

ScalarSlice SampledField::pressure_slice(int k) const {
  if (!has_pressure()) throw DomainError("field has no pressure");
  ScalarSlice s{geom_, {}};
  const double* src = pressure_data(k);
  s.values.assign(src, src + nnode_);
  return s;
}

void SampledField::validate() const {
  geom_.validate();
  if (nt_ < 2) throw ParameterError("a field needs at least 2 time samples");
  if (!(t_end_ > t_begin_))
    throw ParameterError("field time interval must have positive length");
  for (double v : velocity_)
    if (!std::isfinite(v)) throw DomainError("velocity contains non-finite values");
  for (double v : pressure_)
    if (!std::isfinite(v)) throw DomainError("pressure contains non-finite values");
}

}  // namespace nssl
