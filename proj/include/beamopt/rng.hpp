#pragma once

// Deterministic random-number generation. All stochastic code in the toolkit
// draws through this class so that a fixed seed reproduces every experiment
// byte-for-byte. std::normal_distribution is implementation-defined, so the
// Gaussian sampler is a hand-rolled Box-Muller on 53-bit uniforms.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "beamopt/linalg.hpp"

namespace beamopt {

/// splitmix64 finalizer; also used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-trial seed contract: independent of the method list, so adding methods
/// never perturbs existing trials.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sweep_index,
                                 std::uint64_t trial_index) {
  std::uint64_t s = splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (sweep_index + 1)));
  return splitmix64(s ^ (0xBF58476D1CE4E5B9ULL * (trial_index + 1)));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  /// Uniform on (0, 1] (never 0, so log() is safe).
  double uniform01() { return ((gen_() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * ((gen_() >> 11) * 0x1.0p-53);
  }

  /// Standard normal via Box-Muller (one uniform pair per variate; simple and
  /// fully deterministic).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
  }

  /// Circular complex Gaussian with E|x|^2 = power: two real normals scaled
  /// by sqrt(power/2).
  cd cnormal(double power = 1.0) {
    const double s = std::sqrt(power / 2.0);
    const double re = normal();
    const double im = normal();
    return cd(s * re, s * im);
  }

  CVec cnormal_vector(Eigen::Index n, double power = 1.0) {
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal(power);
    return v;
  }

  CMat cnormal_matrix(Eigen::Index rows, Eigen::Index cols, double power = 1.0) {
    CMat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cnormal(power);
    return m;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace beamopt
