#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "csradar/types.hpp"

namespace csradar {

struct ArrayGeometry {
  RVec tx_positions;  // p_j, i.i.d. uniform on [0, n_rx*n_tx/2]
  RVec rx_positions;  // q_j
  std::uint64_t seed = 0;

  int n_tx() const { return static_cast<int>(tx_positions.size()); }
  int n_rx() const { return static_cast<int>(rx_positions.size()); }
};

ArrayGeometry sample_geometry(int n_tx, int n_rx, std::uint64_t seed);

// Azimuth-delay-Doppler discretization. Delays are integer circular shifts
// (one sample each), Doppler bins are integer DFT frequencies, azimuth points
// are beta_n = n * delta_beta for n = 1..n_azimuth.
struct Grid {
  int n_delay = 0;    // N_tau
  int n_doppler = 0;  // N_f
  int n_azimuth = 0;  // N_beta = N_R * N_T
  double delta_beta = 0.0;

  std::int64_t cells() const {
    return static_cast<std::int64_t>(n_delay) * n_doppler * n_azimuth;
  }
  double azimuth(int n) const { return (n + 1) * delta_beta; }  // n = 0-based

  // Domain layout: delay fastest, Doppler next, azimuth slowest.
  std::int64_t cell_index(int tau, int f, int b) const {
    return tau + static_cast<std::int64_t>(n_delay) * (f + static_cast<std::int64_t>(n_doppler) * b);
  }
  void cell_coords(std::int64_t idx, int& tau, int& f, int& b) const;
};

Grid make_grid(int n_delay, int n_doppler, int n_rx, int n_tx);

std::pair<CVec, CVec> steering_vectors(const ArrayGeometry& geom, double beta);

struct MagnitudeModel {
  enum class Kind { constant, uniform, log_normal } kind = Kind::constant;
  double a = 1.0;  // constant value / uniform lower / log-mean
  double b = 1.0;  // uniform upper / log-sigma
};

struct SparseScene {
  std::vector<std::int64_t> support;  // distinct cell indices
  CVec amplitudes;                    // aligned with support
  std::uint64_t seed = 0;

  CVec dense(const Grid& grid) const;
  void scale(double c) { amplitudes *= c; }
};

SparseScene sample_scene(const Grid& grid, std::int64_t s,
                         const MagnitudeModel& model, std::uint64_t seed);

double min_amplitude(double sigma, int n_rx, int n_tx, const Grid& grid);

std::string geometry_to_json(const ArrayGeometry& geom);
ArrayGeometry geometry_from_json(const std::string& text);
std::string scene_to_json(const SparseScene& scene);
SparseScene scene_from_json(const std::string& text);

}  // namespace csradar
