/// @file field.hpp
/// @brief Sampled space-time velocity/pressure fields and scalar lattices.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nssl/geometry.hpp"

namespace nssl {

/// One scalar lattice on a grid (a field component, |u|, |grad u|^2, ...).
struct ScalarSlice {
  GridGeometry geom;
  std::vector<double> values;

  double at(int ix, int iy, int iz) const {
    return values[geom.index(ix, iy, iz)];
  }
};

/// Discretized velocity field u (three components) with optional pressure P,
/// sampled on a fixed spatial lattice at uniformly spaced times.
///
/// Storage layout matches the NSSF1 payload: time slowest, then component,
/// then z, y, x (fastest). Pressure is kept in a separate array with the
/// same per-time layout.
class SampledField {
 public:
  SampledField() = default;
  SampledField(GridGeometry geom, double t_begin, double t_end, int nt,
               bool with_pressure);

  const GridGeometry& geometry() const { return geom_; }
  int nt() const { return nt_; }
  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  double dt() const { return (t_end_ - t_begin_) / (nt_ - 1); }
  double time(int k) const { return t_begin_ + dt() * k; }
  bool has_pressure() const { return !pressure_.empty(); }

  /// Index of the nearest sample at or below t. Sample hits are snapped to
  /// within a relative 1e-9 of the spacing before flooring.
  int sample_at_or_below(double t) const;
  /// True when t lies inside [t_begin, t_end] up to the same snap tolerance.
  bool covers_time(double t) const;

  double& u(int comp, int k, std::size_t node) {
    return velocity_[(static_cast<std::size_t>(k) * 3 + comp) * nnode_ + node];
  }
  double u(int comp, int k, std::size_t node) const {
    return velocity_[(static_cast<std::size_t>(k) * 3 + comp) * nnode_ + node];
  }
  Vec3 velocity(int k, std::size_t node) const {
    return {u(0, k, node), u(1, k, node), u(2, k, node)};
  }
  double& p(int k, std::size_t node) {
    return pressure_[static_cast<std::size_t>(k) * nnode_ + node];
  }
  double p(int k, std::size_t node) const {
    return pressure_[static_cast<std::size_t>(k) * nnode_ + node];
  }

  const double* component_data(int comp, int k) const {
    return velocity_.data() +
           (static_cast<std::size_t>(k) * 3 + comp) * nnode_;
  }
  const double* pressure_data(int k) const {
    return pressure_.data() + static_cast<std::size_t>(k) * nnode_;
  }

  ScalarSlice component_slice(int comp, int k) const;
  /// Pointwise Euclidean magnitude |u| at sample k.
  ScalarSlice speed_slice(int k) const;
  ScalarSlice pressure_slice(int k) const;

  void validate() const;

 private:
  GridGeometry geom_;
  double t_begin_ = 0.0, t_end_ = 1.0;
  int nt_ = 0;
  std::size_t nnode_ = 0;
  std::vector<double> velocity_;
  std::vector<double> pressure_;
};

/// Reads an NSSF1 field file. Throws FormatError (with byte offset) on a bad
/// magic, version, or payload size; ParameterError on inconsistent header
/// values.
SampledField load_field(const std::string& path);

/// Writes the field in NSSF1 layout (little-endian payload).
void save_field(const SampledField& field, const std::string& path);

}  // namespace nssl
