#pragma once

// Single-group multicast beamforming by semidefinite relaxation: minimize
// transmit power subject to per-user SNR floors. Gaussian randomization
// rounds the lifted solution; an alternating phase-fixing SOCP refines it.

#include <limits>
#include <stdexcept>
#include <vector>

#include "beamopt/conic.hpp"
#include "beamopt/linalg.hpp"
#include "beamopt/rng.hpp"

namespace beamopt {

struct MulticastUser {
  CVec channel;          // h_u
  double snr_min = 1.0;  // rho_min
  double noise_power = 1.0;
};

/// h~_u = h_u / sqrt(rho_min sigma_u^2); the QoS constraints become
/// |w^H h~_u|^2 >= 1.
inline CVec normalized_channel(const MulticastUser& u) {
  if (!(u.snr_min > 0.0) || !(u.noise_power > 0.0))
    throw std::domain_error("multicast: snr_min and noise_power must be positive");
  if (!(u.channel.norm() > 0.0)) throw std::domain_error("multicast: zero channel");
  return u.channel / std::sqrt(u.snr_min * u.noise_power);
}

struct MulticastSolution {
  CVec w;                    // rounded (and possibly refined) beamformer
  CMat lifted;               // SDR solution M
  double sdr_value = 0.0;    // tr(M), lower bound on the power
  double rounded_value = 0.0;  // ||w||^2
  double rank_ratio = 0.0;   // lambda2/lambda1 of M
  ConicStatus status = ConicStatus::Optimal;
};

/// Scale w so min_u |w^H h~_u| = 1 exactly (QoS feasible with one active user).
inline CVec enforce_feasible(const CVec& w, const std::vector<CVec>& hn) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& h : hn) worst = std::min(worst, std::abs(cd(w.dot(h))));
  if (!(worst > 0.0))
    throw std::runtime_error("multicast: candidate orthogonal to a user channel");
  return w / worst;
}

/// SDR lower bound + Gaussian randomization rounding.
///   min tr(M) s.t. tr(M D_u) >= 1, M >= 0,  D_u = h~_u h~_u^H.
inline MulticastSolution multicast_sdr(const std::vector<MulticastUser>& users, Rng& rng,
                                       int n_randomizations = 200,
                                       ConicSettings settings = {.tol = 1e-8,
                                                                 .max_iter = 200000}) {
  if (users.empty()) throw std::invalid_argument("multicast_sdr: no users");
  const int n = int(users.front().channel.size());
  std::vector<CVec> hn;
  for (const auto& u : users) {
    if (u.channel.size() != n) throw std::invalid_argument("multicast_sdr: channel size mismatch");
    hn.push_back(normalized_channel(u));
  }
  const int nu = int(hn.size());

  HermitianVariable hv(n);
  const int np = hv.param_count();
  const int psd_rows = svec_dim(2 * n);
  ConicProblem prob;
  prob.c = hv.trace_row(CMat::Identity(n, n));  // tr(M)
  prob.A = RMat::Zero(nu + psd_rows, np);
  prob.b = RVec::Zero(nu + psd_rows);
  for (int u = 0; u < nu; ++u) {
    // s_u = tr(M D_u) - 1 >= 0.
    prob.A.row(u) = -hv.trace_row(hn[u] * hn[u].adjoint()).transpose();
    prob.b(u) = -1.0;
  }
  prob.A.bottomRows(psd_rows) = -hv.embed_map();
  prob.cones = {{ConeSpec::NonNeg, nu}, {ConeSpec::Psd, 2 * n}};

  const ConicSolution sol = conic_solve(prob, settings);
  if (sol.status == ConicStatus::Infeasible)
    throw std::runtime_error("multicast_sdr: relaxation reported infeasible");
  const double worst_res = std::max({sol.primal_residual, sol.dual_residual, sol.gap});
  if (sol.status == ConicStatus::MaxIterations && !(worst_res < 50.0 * settings.tol))
    throw std::runtime_error("multicast_sdr: conic solver did not converge");

  MulticastSolution out;
  out.status = sol.status;
  out.lifted = hv.unpack(sol.x);
  out.sdr_value = std::real(out.lifted.trace());

  const PrincipalPair pp = principal_eigenvector(out.lifted);
  if (!(pp.value > 0.0)) throw std::runtime_error("multicast_sdr: degenerate lifted solution");
  out.rank_ratio = std::max(pp.second, 0.0) / pp.value;

  // Candidate set: principal component plus Gaussian draws w ~ CN(0, M).
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (out.lifted + out.lifted.adjoint()));
  const CMat half =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  double best = std::numeric_limits<double>::infinity();
  CVec best_w;
  auto consider = [&](const CVec& cand) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& h : hn) worst = std::min(worst, std::abs(cd(cand.dot(h))));
    if (!(worst > 1e-12)) return;
    const CVec scaled = cand / worst;
    const double power = scaled.squaredNorm();
    if (power < best) {
      best = power;
      best_w = scaled;
    }
  };
  consider(std::sqrt(pp.value) * pp.vector);
  for (int k = 0; k < n_randomizations; ++k) consider(half * rng.cnormal_vector(n));
  if (best_w.size() == 0) throw std::runtime_error("multicast_sdr: randomization failed");
  out.w = best_w;
  out.rounded_value = best;
  return out;
}

struct MulticastRefineResult {
  CVec w;
  double value = 0.0;
  std::vector<double> trace;  // power after each accepted iterate
};

/// Alternating convexification: fix the constraint phases at the current
/// iterate and solve min ||w|| s.t. Re(e^{-j phi_u} w^H h~_u) >= 1 as an SOCP;
/// each iterate is rescaled to exact feasibility and accepted only if the
/// power strictly improves (monotone safeguard).
inline MulticastRefineResult alternating_refine(const std::vector<MulticastUser>& users,
                                                const CVec& w0, int max_iter = 30,
                                                ConicSettings settings = {.tol = 1e-8,
                                                                          .max_iter = 200000}) {
  std::vector<CVec> hn;
  for (const auto& u : users) hn.push_back(normalized_channel(u));
  const int n = int(w0.size());
  const int nu = int(hn.size());

  MulticastRefineResult out;
  out.w = enforce_feasible(w0, hn);
  out.value = out.w.squaredNorm();
  out.trace.push_back(out.value);

  for (int it = 0; it < max_iter; ++it) {
    // SOCP: variables (Re w, Im w, t); min t with (t, stack(w)) in SOC and
    // per-user half-space constraints at the current phases.
    const int nv = 2 * n + 1;
    ConicProblem prob;
    prob.c = RVec::Zero(nv);
    prob.c(nv - 1) = 1.0;
    prob.A = RMat::Zero(nu + 2 * n + 1, nv);
    prob.b = RVec::Zero(nu + 2 * n + 1);
    for (int u = 0; u < nu; ++u) {
      const cd inner = out.w.dot(hn[u]);
      const cd phase = std::abs(inner) > 0.0 ? inner / std::abs(inner) : cd(1.0, 0.0);
      // Re(conj(phase) w^H h) = Re(w^H (conj(phase) h)) >= 1.
      prob.A.row(u).head(2 * n) = -re_inner_row(std::conj(phase) * hn[u]).transpose();
      prob.b(u) = -1.0;
    }
    prob.A(nu, nv - 1) = -1.0;
    prob.A.block(nu + 1, 0, 2 * n, 2 * n) = -RMat::Identity(2 * n, 2 * n);
    prob.cones = {{ConeSpec::NonNeg, nu}, {ConeSpec::Soc, 2 * n + 1}};

    const ConicSolution sol = conic_solve(prob, settings);
    if (sol.status == ConicStatus::Infeasible) break;
    CVec cand(n);
    for (int i = 0; i < n; ++i) cand(i) = cd(sol.x(i), sol.x(n + i));
    cand = enforce_feasible(cand, hn);
    const double value = cand.squaredNorm();
    if (!(value < out.value)) break;  // safeguard: keep the monotone iterate
    const double improvement = (out.value - value) / out.value;
    out.w = cand;
    out.value = value;
    out.trace.push_back(value);
    if (improvement < 1e-8) break;
  }
  return out;
}

}  // namespace beamopt
