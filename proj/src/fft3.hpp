/// @file fft3.hpp
/// @brief Internal complex 3-D FFT wrapper over FFTW (x fastest, matching the
///        SampledField node layout). Not installed; library-private.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace nssl::fft {

/// Unnormalized c2c transforms of one grid shape. Plans are built once in the
/// constructor (FFTW planning is serialized internally) and reused on any
/// caller buffer.
class Transform3 {
 public:
  Transform3(int nx, int ny, int nz);
  ~Transform3();
  Transform3(const Transform3&) = delete;
  Transform3& operator=(const Transform3&) = delete;

  void forward(std::complex<double>* buf) const;
  /// Unnormalized; divide by size() to invert forward().
  void inverse(std::complex<double>* buf) const;

  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  void* plan_fwd_;
  void* plan_inv_;
  std::vector<std::complex<double>> scratch_;
};

/// Signed integer frequency of DFT bin j on an n-point axis.
inline int freq(int j, int n) { return 2 * j <= n ? j : j - n; }

}  // namespace nssl::fft
