#pragma once

// Intelligent reflecting surface link optimization: maximize the received
// power |(h_IRS^H Psi H_BS + h_D^H) f|^2 over the transmit beamformer f
// (power-limited) and the unit-modulus reflection phases, by alternating a
// matched-filter f-step with a closed-form phase-alignment step.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamopt/linalg.hpp"
#include "beamopt/rng.hpp"

namespace beamopt {

struct IrsScenario {
  CMat h_bs;     // N_IRS x N base-station -> surface channel
  CVec h_irs;    // N_IRS surface -> user channel
  CVec h_d;      // N direct base-station -> user channel
  double p_max = 1.0;  // transmit power budget
  /// The source formulation writes the budget as ||f||_2 <= p_max; by default
  /// it is read as a power bound ||f||^2 <= p_max. Set literal_norm_bound to
  /// reproduce the literal norm reading.
  bool literal_norm_bound = false;

  double norm_budget() const {
    if (!(p_max > 0.0)) throw std::domain_error("irs: p_max must be positive");
    return literal_norm_bound ? p_max : std::sqrt(p_max);
  }
};

/// Conjugate-transposed composite channel h_eff = (h_IRS^H Psi H_BS + h_D^H)^H
/// for phase vector psi (radians), so the received amplitude is h_eff^H f.
inline CVec irs_effective_channel(const IrsScenario& sc, const RVec& phases) {
  const Eigen::Index n_irs = sc.h_bs.rows();
  if (sc.h_irs.size() != n_irs || sc.h_d.size() != sc.h_bs.cols() ||
      phases.size() != n_irs)
    throw std::invalid_argument("irs_effective_channel: dimension mismatch");
  CVec row = sc.h_d;  // accumulates (h_D^H + h_IRS^H Psi H_BS)^H
  for (Eigen::Index k = 0; k < n_irs; ++k) {
    const cd coef = std::conj(sc.h_irs(k)) * std::exp(cd(0.0, phases(k)));
    row += std::conj(coef) * sc.h_bs.row(k).adjoint();
  }
  return row;
}

struct IrsSolution {
  CVec f;
  RVec phases;
  double objective = 0.0;          // |h_eff^H f|^2
  std::vector<double> trace;       // objective after each alternation
  std::string status = "ok";       // "degenerate" when all channels vanish
  int iterations = 0;
};

namespace detail {

/// One full alternation pass from the given phases; both half-steps are
/// optimal given the other block, so the objective trace is non-decreasing.
inline IrsSolution irs_alternate_from(const IrsScenario& sc, RVec phases, int max_iter,
                                      double tol) {
  const double budget = sc.norm_budget();
  const Eigen::Index n_irs = sc.h_bs.rows();
  IrsSolution out;
  double prev = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    // f-step: matched filter at full power.
    const CVec heff = irs_effective_channel(sc, phases);
    const double hn = heff.norm();
    if (!(hn > 0.0)) {
      out.f = CVec::Zero(sc.h_d.size());
      out.phases = phases;
      out.objective = 0.0;
      out.status = "degenerate";
      out.trace.push_back(0.0);
      return out;
    }
    const CVec f = budget * heff / hn;
    const double obj = std::norm(cd(heff.dot(f)));
    out.trace.push_back(obj);
    out.iterations = it + 1;
    if (prev >= 0.0 && obj - prev <= tol * std::max(1.0, prev)) {
      out.f = f;
      out.phases = phases;
      out.objective = obj;
      return out;
    }
    prev = obj;
    // Phase step: received amplitude = beta0 + sum_k e^{j phi_k} beta_k with
    // beta_k = conj(h_IRS,k) (H_BS row_k) f; aligning every term with beta0
    // (or with a common phase when beta0 = 0) is the exact maximizer.
    const cd beta0 = sc.h_d.dot(f);  // h_D^H f
    const double ref = std::abs(beta0) > 0.0 ? std::arg(beta0) : 0.0;
    const CVec bsf = sc.h_bs * f;
    for (Eigen::Index k = 0; k < n_irs; ++k) {
      const cd beta_k = std::conj(sc.h_irs(k)) * bsf(k);
      if (std::abs(beta_k) > 0.0) phases(k) = ref - std::arg(beta_k);
    }
    out.f = f;
    out.phases = phases;
    out.objective = obj;
  }
  return out;
}

}  // namespace detail

/// Matched-filter objective for a fixed phase configuration: the best
/// achievable |h_eff^H f|^2 under the power budget is budget^2 ||h_eff||^2.
inline double irs_objective(const IrsScenario& sc, const RVec& phases) {
  const double budget = sc.norm_budget();
  const CVec heff = irs_effective_channel(sc, phases);
  return budget * budget * heff.squaredNorm();
}

/// Phases that align every reflected term with the direct path under the
/// direct-matched beamformer f0 = budget * h_D / ||h_D||. Starting the
/// alternation here guarantees the converged objective dominates the no-IRS
/// baseline budget^2 ||h_D||^2 (the very first f-step already does).
inline RVec irs_direct_aligned_phases(const IrsScenario& sc) {
  const Eigen::Index n_irs = sc.h_bs.rows();
  RVec phases = RVec::Zero(n_irs);
  const double dn = sc.h_d.norm();
  if (!(dn > 0.0)) return phases;
  const CVec f0 = sc.h_d / dn;
  const cd beta0 = sc.h_d.dot(f0);
  const double ref = std::abs(beta0) > 0.0 ? std::arg(beta0) : 0.0;
  const CVec bsf = sc.h_bs * f0;
  for (Eigen::Index k = 0; k < n_irs; ++k) {
    const cd beta_k = std::conj(sc.h_irs(k)) * bsf(k);
    if (std::abs(beta_k) > 0.0) phases(k) = ref - std::arg(beta_k);
  }
  return phases;
}

/// Alternating maximization with deterministic multi-start: zero phases, the
/// direct-aligned phases, `multi_start - 1` random draws, and any caller
/// supplied extra starts. Returns the best run's solution with its
/// per-iteration objective trace. Because every half-step is optimal given
/// the other block, the returned objective is at least the matched-filter
/// value irs_objective(sc, phases) of every start.
inline IrsSolution irs_alternating(const IrsScenario& sc, Rng& rng, int multi_start = 4,
                                   int max_iter = 100, double tol = 1e-10,
                                   const std::vector<RVec>& extra_starts = {}) {
  if (multi_start < 1) throw std::invalid_argument("irs_alternating: multi_start >= 1");
  const Eigen::Index n_irs = sc.h_bs.rows();
  std::vector<RVec> starts;
  starts.push_back(RVec::Zero(n_irs));
  starts.push_back(irs_direct_aligned_phases(sc));
  for (int s = 1; s < multi_start; ++s) {
    RVec phases(n_irs);
    for (Eigen::Index k = 0; k < n_irs; ++k) phases(k) = rng.uniform(0.0, 2.0 * pi);
    starts.push_back(std::move(phases));
  }
  for (const RVec& phases : extra_starts) {
    if (phases.size() != n_irs)
      throw std::invalid_argument("irs_alternating: extra start has wrong size");
    starts.push_back(phases);
  }
  IrsSolution best;
  best.objective = -1.0;
  for (const RVec& phases : starts) {
    IrsSolution run = detail::irs_alternate_from(sc, phases, max_iter, tol);
    if (run.objective > best.objective) best = run;
  }
  return best;
}

}  // namespace beamopt
