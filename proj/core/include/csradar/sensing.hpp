#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "csradar/fft.hpp"
#include "csradar/scene_grid.hpp"
#include "csradar/types.hpp"
#include "csradar/waveforms.hpp"

namespace csradar {

// Matrix-free azimuth-delay-Doppler measurement operator with columns
//   A_{tau,f,beta} = a_R(beta) (x) M_f T_tau (S a_T(beta)).
// Domain layout: delay fastest, then Doppler, then azimuth. Range layout is
// receiver-major: block j of length N_s holds receiver j's samples.
class SensingOperator {
 public:
  SensingOperator(WaveformSet waveforms, ArrayGeometry geometry, Grid grid);

  const WaveformSet& waveforms() const { return waveforms_; }
  const ArrayGeometry& geometry() const { return geometry_; }
  const Grid& grid() const { return grid_; }

  std::int64_t domain_dim() const { return grid_.cells(); }
  std::int64_t range_dim() const {
    return static_cast<std::int64_t>(geometry_.n_rx()) * n_samples_;
  }
  int n_samples() const { return n_samples_; }

  // y = A x via per-azimuth circular convolution (FFT).
  CVec apply_forward(const CVec& x) const;
  // x = A* y via circular correlation (FFT).
  CVec apply_adjoint(const CVec& y) const;

  // Single column, materialized (used by the dense oracle and the debiaser).
  CVec column(int tau, int f, int b) const;
  CVec column(std::int64_t cell) const;

  // Composite signal S a_T(beta_b), length N_s.
  const CVec composite(int b) const { return composites_.col(b); }

 private:
  WaveformSet waveforms_;
  ArrayGeometry geometry_;
  Grid grid_;
  int n_samples_;
  CMat composites_;      // N_s x N_beta, S a_T(beta)
  CMat composites_hat_;  // forward FFT of each composite
  CMat rx_manifold_;     // N_R x N_beta
  CMat doppler_;         // N_s x N_f phase table e^{2 pi i f l / N_s}
  std::unique_ptr<Fft> fft_;
};

// Dense realization of the operator; columns ordered delay-fastest.
// Throws if rows*cols exceeds max_entries (default 2^27).
CMat dense_matrix(const SensingOperator& op,
                  std::int64_t max_entries = std::int64_t{1} << 27);

struct ColumnNorms {
  RVec per_azimuth_norm2;  // ||A_{tau,f,beta}||^2 for each beta (tau,f-invariant)
  RVec norms;              // domain-length column l2 norms
  double kappa_d = 0.0;    // condition number of the normalizer D
};

ColumnNorms column_norms(const SensingOperator& op);

struct CoherenceResult {
  double mu = 0.0;               // normalized coherence
  double max_inner_product = 0.0;  // unnormalized max |<A_k, A_l>|, k != l
  std::int64_t argmax_k = -1;
  std::int64_t argmax_l = -1;
};

// Dense-mode coherence (Gram matrix); subject to the same memory cap.
CoherenceResult coherence(const SensingOperator& op,
                          std::int64_t max_entries = std::int64_t{1} << 27);

struct OperatorNormResult {
  double norm = 0.0;  // largest singular value
  int iterations = 0;
  bool converged = false;
};

// Power iteration on A*A from a seeded random start.
OperatorNormResult operator_norm(const SensingOperator& op, double tol = 1e-6,
                                 int max_iters = 500, std::uint64_t seed = 0);

struct Measurement {
  CVec y;
  double sigma = 0.0;  // noise std per complex component
  std::uint64_t seed = 0;
};

// Output-SNR convention: sigma^2 = ||y_clean||^2 / (range_dim * 10^(SNR/10)).
// snr_db = +infinity yields sigma = 0.
Measurement add_noise(const CVec& y_clean, double snr_db, std::uint64_t seed);

// Adds circular complex Gaussian noise with the given per-component std.
Measurement add_noise_sigma(const CVec& y_clean, double sigma,
                            std::uint64_t seed);

std::string operator_config_to_json(const SensingOperator& op,
                                    const std::string& waveform_file = "");
void write_measurement_csv(const Measurement& m, const std::string& path);
Measurement read_measurement_csv(const std::string& path);

}  // namespace csradar
