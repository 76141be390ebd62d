#pragma once

// Hybrid analog/digital precoding: optimal digital baseline (SVD), spatially
// sparse OMP over a steering dictionary, manifold-optimization alternation,
// finite-resolution phase quantization, wideband designs with a shared analog
// stage, THz beam-squint diagnostics and per-subcarrier digital correction,
// joint radar-communication tradeoff designs, low-resolution ADC quantization
// and ZF/MRC combining.
//
// Convention: channels are receive x transmit (N_R x N); the analog stage
// F_RF is N x N_RF with constant-modulus entries of modulus 1/sqrt(N); the
// effective precoder is F_RF * F_BB[m]. After terminal normalization
// ||F_RF F_BB[m]||_F = sqrt(N_S) on every subcarrier.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamopt/linalg.hpp"
#include "beamopt/manifold.hpp"
#include "beamopt/model.hpp"
#include "beamopt/procrustes.hpp"

namespace beamopt {

struct HybridConfig {
  int n_tx = 36;
  int n_rx = 16;
  int n_rf = 4;
  int n_streams = 2;
  int n_subcarriers = 1;
  double rx_power = 1.0;     // kappa in the mutual-information expression
  double noise_power = 1.0;  // sigma_n^2
};

struct HybridBeamformer {
  CMat f_rf;                  // N x N_RF, constant-modulus entries
  std::vector<CMat> f_bb;     // one N_RF x N_S block per subcarrier
  double cost = 0.0;          // final Euclidean fit before normalization
  std::vector<double> trace;  // fit after each outer alternation
  std::string method;
};

inline CMat effective_precoder(const HybridBeamformer& hb, int m = 0) {
  return hb.f_rf * hb.f_bb.at(m);
}

// ---- digital baseline and rate -------------------------------------------------

/// Fully digital precoder: top-N_S right singular vectors of H, Frobenius
/// norm sqrt(N_S). Columns get the deterministic phase convention.
inline CMat optimal_digital(const CMat& h, int n_streams) {
  if (n_streams < 1 || n_streams > std::min(h.rows(), h.cols()))
    throw std::invalid_argument("optimal_digital: invalid stream count");
  Eigen::JacobiSVD<CMat> svd(h, Eigen::ComputeThinV);
  CMat fc = svd.matrixV().leftCols(n_streams);
  for (int j = 0; j < n_streams; ++j) fc.col(j) = fix_phase(fc.col(j));
  fc *= std::sqrt(double(n_streams)) / fc.norm();
  return fc;
}

/// Gaussian-signaling mutual information
///   log2 det(I + kappa/(N_S sigma_n^2) H F F^H H^H)   [bits/s/Hz]
/// computed from the eigenvalues of the N_S x N_S Gram of H F.
inline double spectral_efficiency(const CMat& h, const CMat& f, double kappa,
                                  double noise_power, int n_streams) {
  if (!(kappa > 0.0) || !(noise_power > 0.0))
    throw std::domain_error("spectral_efficiency: powers must be positive");
  const CMat hf = h * f;
  const double c = kappa / (double(n_streams) * noise_power);
  Eigen::SelfAdjointEigenSolver<CMat> es(hf.adjoint() * hf, Eigen::EigenvaluesOnly);
  double se = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    se += std::log2(1.0 + c * std::max(0.0, es.eigenvalues()(i)));
  return se;
}

/// Wideband spectral efficiency: average of the per-subcarrier rates.
inline double spectral_efficiency(const std::vector<CMat>& h_m, const std::vector<CMat>& f_m,
                                  double kappa, double noise_power, int n_streams) {
  if (h_m.empty() || h_m.size() != f_m.size())
    throw std::invalid_argument("spectral_efficiency: subcarrier count mismatch");
  double acc = 0.0;
  for (std::size_t m = 0; m < h_m.size(); ++m)
    acc += spectral_efficiency(h_m[m], f_m[m], kappa, noise_power, n_streams);
  return acc / double(h_m.size());
}

// ---- normalization ---------------------------------------------------------------

/// Terminal power normalization: scale every digital block so that
/// ||F_RF F_BB[m]||_F = sqrt(N_S) (hence the wideband aggregate equals M N_S).
inline void normalize_hybrid(HybridBeamformer& hb) {
  for (auto& bb : hb.f_bb) {
    const double nrm = (hb.f_rf * bb).norm();
    if (!(nrm > 0.0)) throw std::runtime_error("normalize_hybrid: zero effective precoder");
    bb *= std::sqrt(double(bb.cols())) / nrm;
  }
}

// ---- OMP over a steering dictionary ------------------------------------------------

/// 2N-point transmit steering dictionary, uniform in sin(theta).
inline CMat steering_dictionary(const ArrayGeometry& g, int count = 0) {
  const int n = g.n_elements;
  if (count <= 0) count = 2 * n;
  CMat dict(n, count);
  for (int k = 0; k < count; ++k) {
    const double s = -1.0 + (k + 0.5) * 2.0 / count;
    dict.col(k) = steering_vector(g, rad2deg(std::asin(s)));
  }
  return dict;
}

inline CMat pinv_solve(const CMat& a, const CMat& b) {
  return a.completeOrthogonalDecomposition().solve(b);
}

/// Spatially sparse precoding: greedy atom selection against the residual,
/// least-squares digital stage, residual renormalization. Atoms are distinct.
inline HybridBeamformer omp_hybrid(const CMat& f_c, int n_rf, const CMat& dictionary) {
  const int n = int(f_c.rows());
  const int ns = int(f_c.cols());
  if (dictionary.rows() != n) throw std::invalid_argument("omp_hybrid: dictionary row mismatch");
  if (n_rf < ns || n_rf > n) throw std::invalid_argument("omp_hybrid: need N_S <= N_RF <= N");
  if (dictionary.cols() < n_rf)
    throw std::invalid_argument("omp_hybrid: dictionary smaller than N_RF");

  HybridBeamformer hb;
  hb.method = "omp";
  hb.f_rf.resize(n, 0);
  CMat fres = f_c;
  std::vector<bool> used(dictionary.cols(), false);
  CMat fbb;
  for (int r = 0; r < n_rf; ++r) {
    const CMat psi = dictionary.adjoint() * fres;
    int best = -1;
    double best_score = -1.0;
    for (int k = 0; k < dictionary.cols(); ++k) {
      if (used[k]) continue;
      const double score = psi.row(k).squaredNorm();
      if (score > best_score) {
        best_score = score;
        best = k;
      }
    }
    used[best] = true;
    hb.f_rf.conservativeResize(n, r + 1);
    hb.f_rf.col(r) = dictionary.col(best);
    fbb = pinv_solve(hb.f_rf, f_c);
    fres = f_c - hb.f_rf * fbb;
    const double rn = fres.norm();
    hb.trace.push_back(rn);
    if (rn > 1e-14) fres /= rn;
  }
  hb.f_bb = {fbb};
  hb.cost = (hb.f_rf * fbb - f_c).squaredNorm();
  normalize_hybrid(hb);
  return hb;
}

/// Convenience overload with the default half-wavelength dictionary.
inline HybridBeamformer omp_hybrid(const CMat& f_c, int n_rf) {
  ArrayGeometry g;
  g.n_elements = int(f_c.rows());
  g.spacing_wavelengths = 0.5;
  return omp_hybrid(f_c, n_rf, steering_dictionary(g));
}

// ---- manifold alternation -----------------------------------------------------------

struct AltMinOptions {
  int max_outer = 50;
  double tol = 1e-6;  // relative change of the summed fit
  ManifoldOptions manifold{.max_iter = 100, .grad_tol = 1e-8};
};

/// Phase-extraction initialization: first min(N_S, N_RF) columns take the
/// phases of the digital target's columns; any remaining columns are DFT
/// columns. All entries have modulus 1/sqrt(N).
inline CMat phase_extraction_init(const CMat& f_c, int n_rf) {
  const int n = int(f_c.rows());
  const int ns = int(f_c.cols());
  CMat f(n, n_rf);
  const double r = 1.0 / std::sqrt(double(n));
  for (int j = 0; j < n_rf; ++j) {
    if (j < ns) {
      for (int i = 0; i < n; ++i) {
        const cd v = f_c(i, j);
        f(i, j) = std::abs(v) > 0.0 ? r * v / std::abs(v) : cd(r, 0.0);
      }
    } else {
      for (int i = 0; i < n; ++i)
        f(i, j) = r * std::exp(cd(0.0, -2.0 * pi * double(i) * double(j) / double(n)));
    }
  }
  return f;
}

/// Alternating minimization of sum_m ||F_RF F_BB[m] - T[m]||_F^2: exact
/// least-squares digital step, Riemannian gradient descent analog step.
/// Returns the un-normalized pair (callers normalize terminally).
inline HybridBeamformer alt_min_hybrid_raw(const std::vector<CMat>& targets, int n_rf,
                                           const AltMinOptions& opts = {},
                                           const CMat& f_init = CMat()) {
  if (targets.empty()) throw std::invalid_argument("alt_min_hybrid: no targets");
  const int n = int(targets.front().rows());
  const int ns = int(targets.front().cols());
  for (const auto& t : targets)
    if (t.rows() != n || t.cols() != ns)
      throw std::invalid_argument("alt_min_hybrid: inconsistent target shapes");
  if (n_rf < ns || n_rf > n) throw std::invalid_argument("alt_min_hybrid: need N_S <= N_RF <= N");

  CMat f_rf = f_init.size() > 0 ? f_init : phase_extraction_init(targets.front(), n_rf);
  if (f_rf.rows() != n || f_rf.cols() != n_rf)
    throw std::invalid_argument("alt_min_hybrid: bad init shape");
  const int msub = int(targets.size());

  HybridBeamformer hb;
  hb.method = "mo";
  hb.f_bb.resize(msub);
  auto digital_step = [&]() {
    double cost = 0.0;
    for (int m = 0; m < msub; ++m) {
      hb.f_bb[m] = pinv_solve(f_rf, targets[m]);
      cost += (f_rf * hb.f_bb[m] - targets[m]).squaredNorm();
    }
    return cost;
  };
  double cost = digital_step();
  hb.trace.push_back(cost);
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    auto fit = [&](const CMat& x) {
      double f = 0.0;
      CMat g = CMat::Zero(n, n_rf);
      for (int m = 0; m < msub; ++m) {
        const CMat e = x * hb.f_bb[m] - targets[m];
        f += e.squaredNorm();
        g += 2.0 * e * hb.f_bb[m].adjoint();
      }
      return std::make_pair(f, g);
    };
    UnitModulusPoint p;
    p.entries = f_rf;
    p.radius = 1.0 / std::sqrt(double(n));
    const ManifoldResult mr = manifold_minimize(fit, p, opts.manifold);
    f_rf = mr.point.entries;
    const double next = digital_step();
    hb.trace.push_back(next);
    const double rel = (cost - next) / std::max(cost, 1e-300);
    cost = next;
    if (rel < opts.tol) break;
  }
  hb.f_rf = f_rf;
  hb.cost = cost;
  return hb;
}

/// Narrowband manifold-optimization hybrid design against F_C.
inline HybridBeamformer mo_hybrid(const CMat& f_c, int n_rf, const AltMinOptions& opts = {},
                                  const CMat& f_init = CMat()) {
  HybridBeamformer hb = alt_min_hybrid_raw({f_c}, n_rf, opts, f_init);
  normalize_hybrid(hb);
  return hb;
}

/// Wideband design: one analog stage against all per-subcarrier targets,
/// per-subcarrier digital stages, per-subcarrier terminal normalization.
inline HybridBeamformer wideband_hybrid(const std::vector<CMat>& f_c_per_subcarrier, int n_rf,
                                        const AltMinOptions& opts = {},
                                        const CMat& f_init = CMat()) {
  HybridBeamformer hb = alt_min_hybrid_raw(f_c_per_subcarrier, n_rf, opts, f_init);
  hb.method = "wideband-mo";
  normalize_hybrid(hb);
  return hb;
}

// ---- finite-resolution phases ----------------------------------------------------------

/// Snap every entry's phase to the nearest point of the 2^bits-point grid
/// {0, 2 pi / 2^bits, ...}; moduli are preserved.
inline CMat quantize_phases(const CMat& f, int bits) {
  if (bits < 1 || bits > 30) throw std::domain_error("quantize_phases: need 1 <= bits <= 30");
  const double step = 2.0 * pi / double(1u << bits);
  CMat q = f;
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      const double mag = std::abs(q(i, j));
      if (!(mag > 0.0)) continue;
      const double ph = std::round(std::arg(q(i, j)) / step) * step;
      q(i, j) = mag * std::exp(cd(0.0, ph));
    }
  return q;
}

/// Quantize the analog stage of a finished design and refit + renormalize the
/// digital stages against the given targets.
inline HybridBeamformer quantize_hybrid(const HybridBeamformer& hb,
                                        const std::vector<CMat>& targets, int bits) {
  if (targets.size() != hb.f_bb.size())
    throw std::invalid_argument("quantize_hybrid: target count mismatch");
  HybridBeamformer out = hb;
  out.method = hb.method + "-q" + std::to_string(bits);
  out.f_rf = quantize_phases(hb.f_rf, bits);
  double cost = 0.0;
  for (std::size_t m = 0; m < targets.size(); ++m) {
    out.f_bb[m] = pinv_solve(out.f_rf, targets[m]);
    cost += (out.f_rf * out.f_bb[m] - targets[m]).squaredNorm();
  }
  out.cost = cost;
  out.trace.clear();
  normalize_hybrid(out);
  return out;
}

// ---- beam squint ------------------------------------------------------------------------

struct SquintDeviation {
  double low_deg = 0.0;   // theta'(f_c - B/2) - theta
  double high_deg = 0.0;  // theta'(f_c + B/2) - theta
};

/// Angular drift of a beam steered at theta for carrier f_c when observed at
/// the band edges: theta'(f) = asin((f_c / f) sin theta).
inline SquintDeviation beam_squint_deviation(double carrier_hz, double bandwidth_hz,
                                             double theta_deg) {
  if (!(carrier_hz > 0.0) || !(bandwidth_hz >= 0.0) || !(bandwidth_hz < 2.0 * carrier_hz))
    throw std::domain_error("beam_squint_deviation: invalid band");
  check_angle(theta_deg, "beam_squint_deviation");
  auto drift = [&](double f) {
    const double s = std::clamp(carrier_hz / f * std::sin(deg2rad(theta_deg)), -1.0, 1.0);
    return rad2deg(std::asin(s)) - theta_deg;
  };
  return {drift(carrier_hz - 0.5 * bandwidth_hz), drift(carrier_hz + 0.5 * bandwidth_hz)};
}

struct SquintCorrection {
  std::vector<CMat> f_bb;  // corrected digital stages
  RVec pointing_deg;       // recovered per-column analog pointing directions
};

/// Beam-squint-aware digital correction: recover each analog column's
/// pointing direction from its beampattern peak (0.1 degree grid), rebuild
/// the squinted analog response F~_RF[m] at each subcarrier frequency, and
/// set F_BB[m] <- pinv(F_RF) F~_RF[m] F_BB[m].
inline SquintCorrection beam_squint_correct(const CMat& f_rf, const std::vector<CMat>& f_bb,
                                            const std::vector<double>& freqs_hz,
                                            const ArrayGeometry& g) {
  if (f_bb.size() != freqs_hz.size())
    throw std::invalid_argument("beam_squint_correct: subcarrier count mismatch");
  const int n = int(f_rf.rows());
  const int nrf = int(f_rf.cols());
  if (g.n_elements != n) throw std::invalid_argument("beam_squint_correct: geometry mismatch");

  SquintCorrection out;
  out.pointing_deg.resize(nrf);
  for (int j = 0; j < nrf; ++j) {
    double best = -1.0, best_theta = 0.0;
    for (int k = 0; k < 1800; ++k) {
      const double th = -89.95 + 0.1 * k;
      const double v = std::abs(cd(steering_vector(g, th).dot(f_rf.col(j))));
      if (v > best) {
        best = v;
        best_theta = th;
      }
    }
    out.pointing_deg(j) = best_theta;
  }
  const auto pinv_frf = f_rf.completeOrthogonalDecomposition();
  for (std::size_t m = 0; m < f_bb.size(); ++m) {
    CMat squinted(n, nrf);
    for (int j = 0; j < nrf; ++j)
      squinted.col(j) = steering_vector_at(g, out.pointing_deg(j), freqs_hz[m]);
    out.f_bb.push_back(pinv_frf.solve(squinted * f_bb[m]));
  }
  return out;
}

// ---- joint radar-communication -----------------------------------------------------------

/// Radar-only analog benchmark: steering columns toward the target angles.
inline CMat radar_steering_matrix(const ArrayGeometry& g, const std::vector<double>& targets_deg) {
  CMat f(g.n_elements, targets_deg.size());
  for (std::size_t k = 0; k < targets_deg.size(); ++k)
    f.col(k) = steering_vector(g, targets_deg[k]);
  return f;
}

struct JrcResult {
  HybridBeamformer hybrid;
  CMat p;                               // K x N_S with P P^H = I
  CMat f_cr;                            // final tradeoff target
  std::vector<double> objective_trace;  // ||F_RF F_BB - F_CR||_F per outer step
};

/// Tradeoff design: F_CR = zeta F_C + (1 - zeta) F_R P with row-orthonormal P.
/// Alternates the hybrid factorization (warm-started manifold alternation)
/// with the Procrustes P-step that minimizes the Eq-level objective; the
/// printed objective is monotone non-increasing. Normalization is terminal.
inline JrcResult jrc_hybrid(const CMat& f_c, const CMat& f_r, double zeta, int n_rf,
                            int max_outer = 20, const AltMinOptions& inner = {}) {
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw std::domain_error("jrc_hybrid: zeta must be in [0, 1]");
  if (f_r.rows() != f_c.rows()) throw std::invalid_argument("jrc_hybrid: row mismatch");

  JrcResult out;
  out.p = orthogonal_procrustes(f_r, f_c);  // K <= N_S enforced inside
  CMat f_rf_init;  // default phase-extraction on the first target
  HybridBeamformer hb;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_outer; ++it) {
    out.f_cr = zeta * f_c + (1.0 - zeta) * f_r * out.p;
    hb = alt_min_hybrid_raw({out.f_cr}, n_rf, inner, f_rf_init);
    f_rf_init = hb.f_rf;  // warm start the next outer round
    const CMat fx = hb.f_rf * hb.f_bb[0];
    if (zeta < 1.0) out.p = orthogonal_procrustes((1.0 - zeta) * f_r, fx - zeta * f_c);
    out.f_cr = zeta * f_c + (1.0 - zeta) * f_r * out.p;
    const double obj = (fx - out.f_cr).norm();
    out.objective_trace.push_back(obj);
    const bool converged = prev - obj < 1e-6 * std::max(1.0, obj);
    prev = obj;
    if (zeta == 1.0 || converged) break;  // zeta = 1 is exactly the plain hybrid fit
  }
  out.hybrid = hb;
  out.hybrid.method = "jrc";
  out.hybrid.cost = prev * prev;
  normalize_hybrid(out.hybrid);
  return out;
}

// ---- receive side: ADC quantization and linear combining -----------------------------------

/// b-bit mid-rise uniform quantization of the combined vector W_RF^H r,
/// applied to real and imaginary parts with range calibrated to +-3 sigma of
/// the pooled components. Idempotent on its own reproduction levels.
inline CVec adc_quantize(const CVec& r, const CMat& w_rf, int bits) {
  if (bits < 1 || bits > 24) throw std::domain_error("adc_quantize: need 1 <= bits <= 24");
  if (w_rf.rows() != r.size()) throw std::invalid_argument("adc_quantize: dimension mismatch");
  const CVec y = w_rf.adjoint() * r;
  const Eigen::Index n = y.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += std::norm(y(i));
  const double sigma = std::sqrt(acc / (2.0 * double(n)));
  if (!(sigma > 0.0)) return y;  // all-zero input quantizes to itself
  const double delta = 2.0 * 3.0 * sigma / double(1u << bits);
  const double vmax = 3.0 * sigma - 0.5 * delta;
  auto q = [&](double v) {
    const double snapped = (std::floor(v / delta) + 0.5) * delta;
    return std::clamp(snapped, -vmax, vmax);
  };
  CVec out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = cd(q(y(i).real()), q(y(i).imag()));
  return out;
}

enum class CombinerMode { Zf, Mrc };

/// Linear combiner for the effective channel H_eff = H F (N_R x N_S): MRC
/// returns H_eff itself; ZF returns H_eff (H_eff^H H_eff)^{-1} so that
/// W^H H_eff = I.
inline CMat zf_mrc_combine(const CMat& h_eff, CombinerMode mode) {
  if (mode == CombinerMode::Mrc) return h_eff;
  const CMat gram = h_eff.adjoint() * h_eff;
  Eigen::JacobiSVD<CMat> svd(h_eff);
  if (!(svd.singularValues().minCoeff() > 1e-12 * svd.singularValues().maxCoeff()))
    throw std::domain_error("zf_mrc_combine: effective channel is rank deficient");
  return h_eff * gram.llt().solve(CMat::Identity(h_eff.cols(), h_eff.cols()));
}

}  // namespace beamopt
