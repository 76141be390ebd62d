#pragma once

// Synthetic array and channel models: ULA steering (far and near field),
// narrowband snapshot generation, true/sample covariances, geometric
// multipath channels (narrowband and wideband with physical beam-squint),
// and angular-sector quadrature matrices.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "beamopt/linalg.hpp"
#include "beamopt/rng.hpp"

namespace beamopt {

struct ArrayGeometry {
  int n_elements = 8;
  double spacing_wavelengths = 0.5;
  double carrier_freq_hz = 3.0e9;

  double wavelength_m() const { return speed_of_light / carrier_freq_hz; }
  double spacing_m() const { return spacing_wavelengths * wavelength_m(); }
  double aperture_m() const { return (n_elements - 1) * spacing_m(); }
};

struct Interferer {
  double direction_deg = 0.0;
  double power = 1.0;
};

struct Scenario {
  double soi_direction_deg = 0.0;
  double soi_power = 1.0;
  std::vector<Interferer> interferers;
  double noise_power = 1.0;
  int snapshots = 100;
  std::uint64_t seed = 1;
};

inline void check_angle(double theta_deg, const char* who) {
  if (!(theta_deg > -90.0 && theta_deg < 90.0))
    throw std::domain_error(std::string(who) + ": direction must lie in (-90, 90) degrees");
}

/// Unit-norm ULA steering vector: a_n = (1/sqrt(N)) e^{-j 2 pi (n-1) (d/lambda) sin theta}.
inline CVec steering_vector(const ArrayGeometry& g, double theta_deg) {
  check_angle(theta_deg, "steering_vector");
  const int n = g.n_elements;
  if (n < 1) throw std::invalid_argument("steering_vector: n_elements must be >= 1");
  const double mu = 2.0 * pi * g.spacing_wavelengths * std::sin(deg2rad(theta_deg));
  CVec a(n);
  const double scale = 1.0 / std::sqrt(double(n));
  for (int i = 0; i < n; ++i) a(i) = scale * std::exp(cd(0.0, -mu * i));
  return a;
}

/// Spherical-wavefront steering vector for a source at (theta, range). Entry n
/// carries phase -(2 pi / lambda) r^(n) with the exact element-to-source
/// distance r^(n) = sqrt(r^2 + ((n-1)d)^2 + 2 (n-1) d r sin theta); the
/// element axis is oriented so that r -> infinity reproduces steering_vector
/// up to a common phase.
inline CVec near_field_steering(const ArrayGeometry& g, double theta_deg, double range_m) {
  check_angle(theta_deg, "near_field_steering");
  if (!(range_m > 0.0)) throw std::domain_error("near_field_steering: range must be positive");
  const int n = g.n_elements;
  const double d = g.spacing_m();
  const double lam = g.wavelength_m();
  const double st = std::sin(deg2rad(theta_deg));
  CVec a(n);
  const double scale = 1.0 / std::sqrt(double(n));
  for (int i = 0; i < n; ++i) {
    const double x = i * d;
    const double rn = std::sqrt(range_m * range_m + x * x + 2.0 * x * range_m * st);
    a(i) = scale * std::exp(cd(0.0, -2.0 * pi * rn / lam));
  }
  return a;
}

/// Fraunhofer (far-field) distance 2 A^2 f_c / c0 for aperture A.
inline double fraunhofer_distance(const ArrayGeometry& g) {
  const double a = g.aperture_m();
  return 2.0 * a * a * g.carrier_freq_hz / speed_of_light;
}

/// N x T snapshot matrix Y = sum_k a(theta_k) s_k + E with iid circular
/// Gaussian waveforms and noise.
inline CMat generate_snapshots(const ArrayGeometry& g, const Scenario& sc, Rng& rng) {
  if (sc.snapshots < 1) throw std::invalid_argument("generate_snapshots: snapshots must be >= 1");
  const int n = g.n_elements;
  const int t = sc.snapshots;
  CMat y = CMat::Zero(n, t);
  std::vector<std::pair<CVec, double>> sources;
  sources.emplace_back(steering_vector(g, sc.soi_direction_deg), sc.soi_power);
  for (const auto& itf : sc.interferers)
    sources.emplace_back(steering_vector(g, itf.direction_deg), itf.power);
  for (const auto& [a, p] : sources) {
    for (int j = 0; j < t; ++j) y.col(j) += a * rng.cnormal(p);
  }
  for (int j = 0; j < t; ++j)
    for (int i = 0; i < n; ++i) y(i, j) += rng.cnormal(sc.noise_power);
  return y;
}

/// Ensemble covariance sum_k sigma_k^2 a_k a_k^H + sigma^2 I; set include_soi
/// = false for the interference-plus-noise covariance.
inline CMat true_covariance(const ArrayGeometry& g, const Scenario& sc, bool include_soi = true) {
  const int n = g.n_elements;
  CMat r = sc.noise_power * CMat::Identity(n, n);
  if (include_soi) {
    const CVec a = steering_vector(g, sc.soi_direction_deg);
    r += sc.soi_power * a * a.adjoint();
  }
  for (const auto& itf : sc.interferers) {
    const CVec a = steering_vector(g, itf.direction_deg);
    r += itf.power * a * a.adjoint();
  }
  return r;
}

inline CMat interference_noise_covariance(const ArrayGeometry& g, const Scenario& sc) {
  return true_covariance(g, sc, false);
}

/// R_hat = (1/T) Y Y^H.
inline CMat sample_covariance(const CMat& y) {
  if (y.cols() < 1) throw std::invalid_argument("sample_covariance: no snapshots");
  return (y * y.adjoint()) / double(y.cols());
}

struct PathParam {
  cd gain;
  double aod_deg = 0.0;
  double aoa_deg = 0.0;
};

/// Geometric multipath channel. `matrix` is receive x transmit (N_R x N) so
/// the effective link is H * F_RF * F_BB. Wideband channels carry one matrix
/// per subcarrier with steering evaluated at the subcarrier frequency, so
/// beam-squint is physically present in the model.
struct ChannelMatrix {
  CMat matrix;                             // at the carrier (narrowband view)
  std::vector<PathParam> paths;
  std::vector<CMat> per_subcarrier;        // empty when narrowband
  std::vector<double> subcarrier_freqs_hz; // empty when narrowband
};

/// Steering vector evaluated at frequency f: spatial frequency scales by
/// f / f_c relative to the carrier design.
inline CVec steering_vector_at(const ArrayGeometry& g, double theta_deg, double freq_hz) {
  check_angle(theta_deg, "steering_vector_at");
  const int n = g.n_elements;
  const double mu =
      2.0 * pi * g.spacing_wavelengths * (freq_hz / g.carrier_freq_hz) * std::sin(deg2rad(theta_deg));
  CVec a(n);
  const double scale = 1.0 / std::sqrt(double(n));
  for (int i = 0; i < n; ++i) a(i) = scale * std::exp(cd(0.0, -mu * i));
  return a;
}

/// Centered subcarrier grid f_m = f_c + B (2m - M + 1) / (2M); equals f_c when M = 1.
inline std::vector<double> subcarrier_frequencies(double carrier_hz, double bandwidth_hz, int m_sub) {
  if (m_sub < 1) throw std::invalid_argument("subcarrier_frequencies: need M >= 1");
  std::vector<double> f(m_sub);
  for (int m = 0; m < m_sub; ++m)
    f[m] = carrier_hz + bandwidth_hz * (2.0 * m - m_sub + 1.0) / (2.0 * m_sub);
  return f;
}

/// Draw an n_paths-path channel between a transmit ULA and an n_rx-element
/// receive ULA (same spacing convention). Normalized so E||H||_F^2 = N_R * N.
/// Angles are uniform on (-aod_spread, aod_spread) etc.; per-path gains are
/// CN(0, 1) and frequency-flat.
inline ChannelMatrix geometric_channel(const ArrayGeometry& tx, int n_rx, int n_paths, Rng& rng,
                                       double angle_spread_deg = 60.0, int m_sub = 1,
                                       double bandwidth_hz = 0.0) {
  if (n_paths < 1) throw std::invalid_argument("geometric_channel: need at least one path");
  if (n_rx < 1) throw std::invalid_argument("geometric_channel: need at least one rx element");
  ArrayGeometry rx = tx;
  rx.n_elements = n_rx;
  ChannelMatrix ch;
  const double scale = std::sqrt(double(tx.n_elements) * double(n_rx) / double(n_paths));
  for (int p = 0; p < n_paths; ++p) {
    PathParam pp;
    pp.gain = rng.cnormal(1.0);
    pp.aod_deg = rng.uniform(-angle_spread_deg, angle_spread_deg);
    pp.aoa_deg = rng.uniform(-angle_spread_deg, angle_spread_deg);
    ch.paths.push_back(pp);
  }
  auto assemble = [&](double freq_hz) {
    CMat h = CMat::Zero(n_rx, tx.n_elements);
    for (const auto& pp : ch.paths)
      h += scale * pp.gain * steering_vector_at(rx, pp.aoa_deg, freq_hz) *
           steering_vector_at(tx, pp.aod_deg, freq_hz).adjoint();
    return h;
  };
  ch.matrix = assemble(tx.carrier_freq_hz);
  if (m_sub > 1 || bandwidth_hz > 0.0) {
    ch.subcarrier_freqs_hz = subcarrier_frequencies(tx.carrier_freq_hz, bandwidth_hz, m_sub);
    for (double f : ch.subcarrier_freqs_hz) ch.per_subcarrier.push_back(assemble(f));
  }
  return ch;
}

/// Angular-sector quadrature matrices for the sector-constrained steering
/// estimator. C integrates a~ a~^H over the sector Theta = [theta_min,
/// theta_max], C_tilde over its complement in (-90, 90); a~ = sqrt(N) a is the
/// modulus-1-entry steering convention matching the ||a_hat||^2 = N shell.
/// delta0 = max over the sector grid of a~^H C_tilde a~.
struct SectorMatrix {
  CMat C;
  CMat C_tilde;
  double delta0 = 0.0;
  double theta_min_deg = 0.0;
  double theta_max_deg = 0.0;
  double grid_step_deg = 0.5;
};

inline SectorMatrix sector_matrices(const ArrayGeometry& g, double theta_min_deg,
                                    double theta_max_deg, double grid_step_deg = 0.5) {
  if (!(theta_min_deg < theta_max_deg))
    throw std::invalid_argument("sector_matrices: need theta_min < theta_max");
  check_angle(theta_min_deg, "sector_matrices");
  check_angle(theta_max_deg, "sector_matrices");
  if (!(grid_step_deg > 0.0)) throw std::invalid_argument("sector_matrices: grid step must be > 0");
  const int n = g.n_elements;
  const double root_n = std::sqrt(double(n));

  // Midpoint quadrature of a~ a~^H over [lo, hi] (radian measure).
  auto integrate = [&](double lo, double hi) {
    CMat acc = CMat::Zero(n, n);
    if (!(hi > lo)) return acc;
    const int cells = std::max(1, int(std::ceil((hi - lo) / grid_step_deg)));
    const double step = (hi - lo) / cells;
    for (int i = 0; i < cells; ++i) {
      const double th = lo + (i + 0.5) * step;
      const CVec a = root_n * steering_vector(g, th);
      acc += (a * a.adjoint()) * deg2rad(step);
    }
    return acc;
  };

  SectorMatrix out;
  out.theta_min_deg = theta_min_deg;
  out.theta_max_deg = theta_max_deg;
  out.grid_step_deg = grid_step_deg;
  out.C = integrate(theta_min_deg, theta_max_deg);
  out.C_tilde = integrate(-90.0 + 1e-9, theta_min_deg) + integrate(theta_max_deg, 90.0 - 1e-9);

  double best = 0.0;
  const int cells = std::max(1, int(std::ceil((theta_max_deg - theta_min_deg) / grid_step_deg)));
  const double step = (theta_max_deg - theta_min_deg) / cells;
  for (int i = 0; i <= cells; ++i) {
    const double th = theta_min_deg + i * step;
    const CVec a = root_n * steering_vector(g, th);
    best = std::max(best, std::real(cd(a.adjoint() * out.C_tilde * a)));
  }
  out.delta0 = best;
  return out;
}

}  // namespace beamopt
