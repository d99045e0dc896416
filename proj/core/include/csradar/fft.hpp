#pragma once

#include "csradar/types.hpp"

namespace csradar {

// Thin FFTW wrapper for fixed-length complex transforms. Plan creation is
// serialized internally; execution on caller buffers is thread-safe, so
// independent operators can run applies concurrently.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }

  // Unnormalized forward transform X(k) = sum_l x(l) e^{-2 pi i k l / n}.
  void forward(const CVec& in, CVec& out) const;
  // Normalized inverse, so inverse(forward(x)) == x.
  void inverse(const CVec& in, CVec& out) const;

 private:
  int n_;
  void* fwd_plan_;
  void* inv_plan_;
};

}  // namespace csradar
