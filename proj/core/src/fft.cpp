#include "csradar/fft.hpp"

#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace csradar {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("Fft: size must be positive");
  std::vector<fftw_complex> buf(static_cast<size_t>(n));
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_plan_ = fftw_plan_dft_1d(n, buf.data(), buf.data(), FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  inv_plan_ = fftw_plan_dft_1d(n, buf.data(), buf.data(), FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!fwd_plan_ || !inv_plan_) throw std::runtime_error("Fft: planning failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_plan_));
}

void Fft::forward(const CVec& in, CVec& out) const {
  if (in.size() != n_) throw std::invalid_argument("Fft::forward: bad length");
  out = in;  // plans are in-place
  fftw_execute_dft(static_cast<fftw_plan>(fwd_plan_),
                   reinterpret_cast<fftw_complex*>(out.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void Fft::inverse(const CVec& in, CVec& out) const {
  if (in.size() != n_) throw std::invalid_argument("Fft::inverse: bad length");
  out = in;
  fftw_execute_dft(static_cast<fftw_plan>(inv_plan_),
                   reinterpret_cast<fftw_complex*>(out.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  out /= static_cast<double>(n_);
}

}  // namespace csradar
