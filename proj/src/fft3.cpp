#include "fft3.hpp"

#include <fftw3.h>

#include <mutex>

namespace nssl::fft {

namespace {
// fftw_plan_* and fftw_destroy_plan are not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Transform3::Transform3(int nx, int ny, int nz)
    : n_(static_cast<std::size_t>(nx) * ny * nz), scratch_(n_) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch_.data());
  // FFTW_UNALIGNED keeps the plans valid for any caller buffer.
  plan_fwd_ = fftw_plan_dft_3d(nz, ny, nx, buf, buf, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_inv_ = fftw_plan_dft_3d(nz, ny, nx, buf, buf, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Transform3::~Transform3() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void Transform3::forward(std::complex<double>* buf) const {
  auto* b = reinterpret_cast<fftw_complex*>(buf);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), b, b);
}

void Transform3::inverse(std::complex<double>* buf) const {
  auto* b = reinterpret_cast<fftw_complex*>(buf);
  fftw_execute_dft(static_cast<fftw_plan>(plan_inv_), b, b);
}

}  // namespace nssl::fft
