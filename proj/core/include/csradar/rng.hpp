#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "csradar/types.hpp"

namespace csradar {

// Splittable counter-based generator built on splitmix64. Every stochastic
// routine in the library takes one of these (or a raw seed) explicitly, so
// experiments replay bit-identically from a master seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Derive an independent stream; used to hand each trial / each purpose
  // (geometry, scene, noise) its own generator.
  Rng split(std::uint64_t stream) const {
    std::uint64_t z = state_ ^ (0x2545f4914f6cdd1dULL * (stream + 1));
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return Rng(z ^ (z >> 33));
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64.
    return next_u64() % n;
  }

  // Standard normal via Box-Muller (hand-rolled: std::normal_distribution is
  // implementation-defined and would break replay across standard libraries).
  double normal() {
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Circular complex Gaussian with E|w|^2 = sigma^2.
  cx complex_normal(double sigma) {
    const double s = sigma / std::sqrt(2.0);
    return {s * normal(), s * normal()};
  }

  cx unit_phase() {
    const double theta = 2.0 * std::numbers::pi * uniform();
    return {std::cos(theta), std::sin(theta)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace csradar
