#pragma once

// Classic and robust adaptive beamformers: Capon/MVDR, LCMV, diagonally
// loaded SMI, sphere-constrained robust Capon (Lagrange secular equation),
// worst-case SOCP, l_p minimum dispersion (IRLS), general-rank max-SINR,
// doubly-constrained steering estimation, and the sector-SDR steering
// estimator. Steering vectors are unit-norm; direction inputs are degrees.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "beamopt/conic.hpp"
#include "beamopt/linalg.hpp"
#include "beamopt/model.hpp"
#include "beamopt/rootfind.hpp"

namespace beamopt {

struct BeamformerWeights {
  CVec w;
  std::string method;
  std::vector<std::pair<std::string, double>> params;
};

/// Shared robustness knobs for the bench method registry.
struct RobustParams {
  double epsilon = 0.0;   // sphere radius^2 (robust Capon) or radius (worst case)
  double gamma = 0.0;     // diagonal loading
  double p = 2.0;         // dispersion exponent
};

// ---- classic -------------------------------------------------------------------

/// Capon/MVDR: w = R^{-1} a / (a^H R^{-1} a); distortionless w^H a = 1.
inline BeamformerWeights capon(const CMat& R, const CVec& a) {
  if (R.rows() != a.size()) throw std::invalid_argument("capon: dimension mismatch");
  const CVec ra = herm_solve(R, a, "capon");
  const double denom = std::real(a.dot(ra));
  if (!(denom > 0.0)) throw std::domain_error("capon: a^H R^{-1} a must be positive");
  return {ra / denom, "capon", {}};
}

/// LCMV: w = R^{-1} C (C^H R^{-1} C)^{-1} u for an N x L constraint matrix.
inline BeamformerWeights lcmv(const CMat& R, const CMat& C, const CVec& u) {
  if (R.rows() != C.rows() || C.cols() != u.size())
    throw std::invalid_argument("lcmv: dimension mismatch");
  Eigen::JacobiSVD<CMat> svd(C);
  if (!(svd.singularValues().minCoeff() > 1e-12 * svd.singularValues().maxCoeff()))
    throw std::invalid_argument("lcmv: constraint matrix is rank deficient");
  const CMat rinv_c = herm_solve(R, C, "lcmv");
  const CMat gram = C.adjoint() * rinv_c;  // L x L, Hermitian positive definite
  const CVec w = rinv_c * Eigen::LLT<CMat>(gram).solve(u);
  return {w, "lcmv", {}};
}

/// Loaded SMI: (R + gamma I)^{-1} a, rescaled to the distortionless response
/// w^H a = 1 (equals Capon on the loaded covariance).
inline BeamformerWeights lsmi(const CMat& R, const CVec& a, double gamma) {
  if (!(gamma >= 0.0)) throw std::domain_error("lsmi: gamma must be >= 0");
  const CMat loaded = R + gamma * CMat::Identity(R.rows(), R.cols());
  BeamformerWeights out = capon(loaded, a);
  out.method = "lsmi";
  out.params = {{"gamma", gamma}};
  return out;
}

// ---- sphere-constrained robust Capon ---------------------------------------------

struct SteeringEstimate {
  CVec a_estimate;
  BeamformerWeights weights;
  double multiplier = 0.0;   // Lagrange multiplier of the sphere/sector search
  double rank_ratio = 0.0;   // lambda2/lambda1 for SDR extractions, else 0
};

/// Robust Capon (sphere uncertainty): estimate the steering vector by
///   min_a a^H R^{-1} a   s.t.  ||a - a_presumed||^2 <= epsilon,
/// then apply Capon. epsilon is the squared sphere radius. The multiplier
/// solves the monotone secular equation ||(I + lambda R)^{-1} a_presumed||^2
/// = epsilon on the eigenbasis of R.
inline SteeringEstimate robust_capon(const CMat& R, const CVec& a_presumed, double epsilon) {
  const double an2 = a_presumed.squaredNorm();
  if (!(epsilon >= 0.0) || !(epsilon < an2))
    throw std::domain_error(
        "robust_capon: need 0 <= epsilon < ||a_presumed||^2 (sphere must exclude the origin)");
  check_hermitian_pd(R, "robust_capon");
  if (epsilon == 0.0) {
    SteeringEstimate out;
    out.a_estimate = a_presumed;
    out.weights = capon(R, a_presumed);
    out.weights.method = "robust-capon";
    return out;
  }

  Eigen::SelfAdjointEigenSolver<CMat> es(R);
  const RVec gam = es.eigenvalues();
  const CVec ap = es.eigenvectors().adjoint() * a_presumed;
  const RVec ap2 = ap.cwiseAbs2();

  auto g = [&](double lam) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < gam.size(); ++i) {
      const double den = 1.0 + lam * gam(i);
      acc += ap2(i) / (den * den);
    }
    return acc - epsilon;
  };
  double hi = 1.0 / gam.maxCoeff();
  while (g(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e18) throw std::runtime_error("robust_capon: secular bracket failed");
  }
  const RootResult root = newton_scalar_root(g, 0.0, hi, 1e-14 * std::max(1.0, an2), 1e-15);

  CVec coeff(ap.size());
  for (Eigen::Index i = 0; i < ap.size(); ++i)
    coeff(i) = ap(i) * (root.x * gam(i)) / (1.0 + root.x * gam(i));
  SteeringEstimate out;
  out.a_estimate = es.eigenvectors() * coeff;
  out.multiplier = root.x;
  out.weights = capon(R, out.a_estimate);
  out.weights.method = "robust-capon";
  out.weights.params = {{"epsilon", epsilon}};
  return out;
}

// ---- worst-case SOCP ---------------------------------------------------------------

/// Worst-case robust beamformer: min w^H R w s.t. |w^H a~| >= 1 for all
/// steering errors ||Delta|| <= epsilon, solved in the standard phase-rotated
/// second-order-cone form Re(w^H a) >= 1 + epsilon ||w||.
inline BeamformerWeights worst_case(const CMat& R, const CVec& a_presumed, double epsilon,
                                    ConicSettings settings = {.tol = 1e-8, .max_iter = 200000}) {
  const int n = int(a_presumed.size());
  if (R.rows() != n) throw std::invalid_argument("worst_case: dimension mismatch");
  if (!(epsilon >= 0.0) || !(epsilon < a_presumed.norm()))
    throw std::domain_error("worst_case: need 0 <= epsilon < ||a_presumed|| for feasibility");
  check_hermitian_pd(R, "worst_case");
  // The argmin is invariant under R -> R/mu (only the epigraph value scales),
  // so normalize to unit spectral scale; unscaled sample covariances put the
  // ADMM iterations badly out of balance with the O(1) constraint rows.
  Eigen::SelfAdjointEigenSolver<CMat> pre(R);
  const double mu = pre.eigenvalues().maxCoeff();
  const CMat lct =
      Eigen::LLT<CMat>(CMat(R / mu)).matrixL().adjoint();  // w^H (R/mu) w = ||L^H w||^2

  // Variables x = (Re w, Im w, t); minimize t.
  const int nv = 2 * n + 1;
  ConicProblem prob;
  prob.c = RVec::Zero(nv);
  prob.c(nv - 1) = 1.0;
  const int m = 2 * (2 * n + 1);
  prob.A = RMat::Zero(m, nv);
  prob.b = RVec::Zero(m);
  // Objective epigraph: (t, stack(L^H w)) in SOC.
  prob.A(0, nv - 1) = -1.0;
  prob.A.block(1, 0, 2 * n, 2 * n) = -complex_op_block(lct);
  // Robust constraint: (Re(w^H a) - 1, epsilon * stack(w)) in SOC.
  const int r2 = 2 * n + 1;
  prob.A.row(r2).head(2 * n) = -re_inner_row(a_presumed).transpose();
  prob.b(r2) = -1.0;
  prob.A.block(r2 + 1, 0, 2 * n, 2 * n) = -epsilon * RMat::Identity(2 * n, 2 * n);
  prob.cones = {{ConeSpec::Soc, 2 * n + 1}, {ConeSpec::Soc, 2 * n + 1}};

  const ConicSolution sol = conic_solve(prob, settings);
  const double worst_res = std::max({sol.primal_residual, sol.dual_residual, sol.gap});
  if (sol.status == ConicStatus::Infeasible ||
      (sol.status == ConicStatus::MaxIterations && !(worst_res < 50.0 * settings.tol)))
    throw std::runtime_error("worst_case: conic solver did not converge");

  CVec w(n);
  for (int i = 0; i < n; ++i) w(i) = cd(sol.x(i), sol.x(n + i));
  return {w, "worst-case", {{"epsilon", epsilon}}};
}

// ---- l_p minimum dispersion ----------------------------------------------------------

/// Iteratively reweighted MVDR for min ||Y^H w||_p^p s.t. a^H w = 1, 1 <= p <=
/// 2. Small residuals are floored at delta = 1e-8 ||Y||_F / sqrt(NT). p = 2 is
/// exactly Capon on the sample covariance.
inline BeamformerWeights min_dispersion(const CMat& Y, const CVec& a, double p,
                                        int max_iter = 500) {
  if (!(p >= 1.0 && p <= 2.0)) throw std::domain_error("min_dispersion: need 1 <= p <= 2");
  if (Y.rows() != a.size()) throw std::invalid_argument("min_dispersion: dimension mismatch");
  const int t = int(Y.cols());
  const double delta = 1e-8 * Y.norm() / std::sqrt(double(Y.rows()) * double(t));
  CVec w = capon(sample_covariance(Y), a).w;
  for (int it = 0; it < max_iter; ++it) {
    RVec d(t);
    for (int i = 0; i < t; ++i) {
      const double r = std::max(std::abs(cd(w.dot(Y.col(i)))), delta);
      d(i) = std::pow(r, p - 2.0);
    }
    const CMat rw = (Y * d.asDiagonal() * Y.adjoint()) / double(t);
    const CVec w_next = capon(rw, a).w;
    const double rel = (w_next - w).norm() / std::max(w.norm(), 1e-300);
    w = w_next;
    if (rel < 1e-8) break;
  }
  return {w, "min-dispersion", {{"p", p}}};
}

/// Dispersion objective sum_i |w^H y_i|^p (diagnostic).
inline double dispersion_objective(const CMat& Y, const CVec& w, double p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < Y.cols(); ++i)
    acc += std::pow(std::abs(cd(w.dot(Y.col(i)))), p);
  return acc;
}

// ---- general-rank ---------------------------------------------------------------------

/// Max-SINR weights for a spread (general-rank) source: principal generalized
/// eigenvector of (R, R_s), scaled so w^H R_s w = 1.
inline BeamformerWeights general_rank(const CMat& R, const CMat& Rs) {
  if (R.rows() != Rs.rows()) throw std::invalid_argument("general_rank: dimension mismatch");
  check_hermitian_pd(R, "general_rank");
  Eigen::GeneralizedSelfAdjointEigenSolver<CMat> ges(Rs, R);
  if (ges.info() != Eigen::Success) throw std::runtime_error("general_rank: eigensolver failed");
  const Eigen::Index n = R.rows();
  const double lam = ges.eigenvalues()(n - 1);
  if (!(lam > 0.0)) throw std::domain_error("general_rank: R_s has no positive-signal direction");
  CVec w = fix_phase(ges.eigenvectors().col(n - 1));
  const double q = std::real(w.dot(Rs * w));
  w /= std::sqrt(q);
  return {w, "general-rank", {}};
}

/// Shrinkage variant: principal generalized eigenvector of (R + gamma_y I,
/// R_s - gamma_s I); throws when the loading fully deflates the signal.
inline BeamformerWeights general_rank_loaded(const CMat& R, const CMat& Rs, double gamma_y,
                                             double gamma_s) {
  if (!(gamma_y >= 0.0 && gamma_s >= 0.0))
    throw std::domain_error("general_rank_loaded: loading factors must be >= 0");
  const Eigen::Index n = R.rows();
  const CMat b = R + gamma_y * CMat::Identity(n, n);
  const CMat a = Rs - gamma_s * CMat::Identity(n, n);
  check_hermitian_pd(b, "general_rank_loaded");
  Eigen::GeneralizedSelfAdjointEigenSolver<CMat> ges(a, b);
  if (ges.info() != Eigen::Success)
    throw std::runtime_error("general_rank_loaded: eigensolver failed");
  const double lam = ges.eigenvalues()(n - 1);
  if (!(lam > 0.0))
    throw std::domain_error("general_rank_loaded: loading fully deflates the signal covariance");
  CVec w = fix_phase(ges.eigenvectors().col(n - 1));
  const double q = std::real(w.dot(Rs * w));
  if (!(q > 0.0))
    throw std::domain_error("general_rank_loaded: degenerate scaling (w^H R_s w <= 0)");
  w /= std::sqrt(q);
  return {w, "general-rank-loaded", {{"gamma_y", gamma_y}, {"gamma_s", gamma_s}}};
}

// ---- doubly-constrained steering estimation ----------------------------------------------

/// Doubly-constrained robust Capon: min a^H R^{-1} a s.t. ||a - a_presumed||^2
/// <= epsilon_a and ||a||^2 = N. The presumed vector is first placed on the
/// norm shell; the KKT family a(c) ∝ (I + c R)^{-1} R a_presumed is swept over
/// the combined multiplier with each candidate projected back to the shell,
/// and c is root-found so the sphere constraint is active.
inline SteeringEstimate doubly_constrained(const CMat& R, const CVec& a_presumed,
                                           double epsilon_a) {
  const int n = int(a_presumed.size());
  if (R.rows() != n) throw std::invalid_argument("doubly_constrained: dimension mismatch");
  if (!(epsilon_a >= 0.0) || !(epsilon_a < 2.0 * n))
    throw std::domain_error("doubly_constrained: need 0 <= epsilon_a < 2N");
  if (!(a_presumed.norm() > 0.0))
    throw std::invalid_argument("doubly_constrained: presumed vector is zero");
  check_hermitian_pd(R, "doubly_constrained");
  const double root_n = std::sqrt(double(n));
  const CVec abar = root_n * a_presumed / a_presumed.norm();

  auto finish = [&](const CVec& est, double mult) {
    SteeringEstimate out;
    out.a_estimate = est;
    out.multiplier = mult;
    out.weights = capon(R, est);
    out.weights.method = "doubly-constrained";
    out.weights.params = {{"epsilon_a", epsilon_a}};
    return out;
  };
  if (epsilon_a == 0.0) return finish(abar, 0.0);

  Eigen::SelfAdjointEigenSolver<CMat> es(R);
  const RVec gam = es.eigenvalues();
  const CVec ap = es.eigenvectors().adjoint() * abar;
  const RVec ap2 = ap.cwiseAbs2();
  const double gmax = gam.maxCoeff();

  // Shell distance of the scaled family member as a function of c:
  // ||sqrt(N) v_hat(c) - abar||^2 = 2N - 2 sqrt(N) Re(v^H abar) / ||v||.
  auto shell_distance2 = [&](double c) {
    double dot = 0.0, nrm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double vi = gam(i) / (1.0 + c * gam(i));
      dot += vi * ap2(i);
      nrm2 += vi * vi * ap2(i);
    }
    return 2.0 * n - 2.0 * root_n * dot / std::sqrt(nrm2);
  };
  auto h = [&](double c) { return shell_distance2(c) - epsilon_a; };

  const double c_lo = -(1.0 - 1e-9) / gmax;
  if (h(c_lo) <= 0.0) {
    // Sphere inactive: shell-only optimum, the principal eigenvector of R
    // phase-aligned with the presumed vector.
    CVec u = es.eigenvectors().col(n - 1);
    const cd overlap = u.dot(abar);
    if (std::abs(overlap) > 0.0) u *= overlap / std::abs(overlap);
    return finish(root_n * u, c_lo);
  }
  double c_hi = 1.0 / gmax;
  while (h(c_hi) > 0.0) {
    c_hi *= 2.0;
    if (c_hi > 1e18 / gmax)
      throw std::runtime_error("doubly_constrained: multiplier bracket failed");
  }
  const RootResult root = newton_scalar_root(h, c_lo, c_hi, 1e-12 * std::max(1.0, epsilon_a));

  CVec coeff(n);
  for (int i = 0; i < n; ++i) coeff(i) = ap(i) * gam(i) / (1.0 + root.x * gam(i));
  CVec est = es.eigenvectors() * coeff;
  est *= root_n / est.norm();
  return finish(est, root.x);
}

// ---- sector-constrained SDR steering estimation --------------------------------------------

/// Eq.-style sector SDR: lift a a^H -> A and solve
///   min tr(R^{-1} A)  s.t.  tr(A) = N,  tr(C_tilde A) <= delta0,  A >= 0,
/// then extract the principal component scaled to the sqrt(N) shell.
inline SteeringEstimate steering_estimate_sdr(const CMat& R, const SectorMatrix& sector,
                                              ConicSettings settings = {.tol = 1e-8,
                                                                        .max_iter = 200000}) {
  const int n = int(R.rows());
  if (sector.C.rows() != n) throw std::invalid_argument("steering_estimate_sdr: dimension mismatch");
  const CMat rinv = herm_solve(R, CMat::Identity(n, n), "steering_estimate_sdr");

  HermitianVariable hv(n);
  const int np = hv.param_count();
  const int psd_rows = svec_dim(2 * n);
  ConicProblem prob;
  prob.c = hv.trace_row(0.5 * (rinv + rinv.adjoint()));
  prob.A = RMat::Zero(2 + psd_rows, np);
  prob.b = RVec::Zero(2 + psd_rows);
  prob.A.row(0) = hv.trace_row(CMat::Identity(n, n)).transpose();
  prob.b(0) = double(n);
  prob.A.row(1) = hv.trace_row(sector.C_tilde).transpose();
  prob.b(1) = sector.delta0;
  prob.A.bottomRows(psd_rows) = -hv.embed_map();
  prob.cones = {{ConeSpec::Zero, 1}, {ConeSpec::NonNeg, 1}, {ConeSpec::Psd, 2 * n}};

  const ConicSolution sol = conic_solve(prob, settings);
  const double worst_res = std::max({sol.primal_residual, sol.dual_residual, sol.gap});
  if (sol.status == ConicStatus::Infeasible ||
      (sol.status == ConicStatus::MaxIterations && !(worst_res < 50.0 * settings.tol)))
    throw std::runtime_error("steering_estimate_sdr: conic solver did not converge");

  const CMat a_lift = hv.unpack(sol.x);
  const PrincipalPair pp = principal_eigenvector(a_lift);
  if (!(pp.value > 0.0))
    throw std::runtime_error("steering_estimate_sdr: degenerate SDR solution");
  SteeringEstimate out;
  out.a_estimate = std::sqrt(double(n)) * pp.vector;
  out.rank_ratio = std::max(pp.second, 0.0) / pp.value;
  out.weights = capon(R, out.a_estimate);
  out.weights.method = "steering-sdr";
  return out;
}

// ---- diagnostics ----------------------------------------------------------------------------

/// Spatial power response |w^H a(theta)|^2 on a grid of directions (linear).
inline RVec beampattern(const CVec& w, const ArrayGeometry& g, const RVec& theta_grid_deg) {
  RVec p(theta_grid_deg.size());
  for (Eigen::Index i = 0; i < theta_grid_deg.size(); ++i) {
    const CVec a = steering_vector(g, theta_grid_deg(i));
    p(i) = std::norm(cd(w.dot(a)));
  }
  return p;
}

/// Output SINR sigma_s^2 |w^H a_0|^2 / (w^H R_{i+n} w), linear.
inline double output_sinr(const CVec& w, const ArrayGeometry& g, const Scenario& sc) {
  const CVec a0 = steering_vector(g, sc.soi_direction_deg);
  const CMat rin = interference_noise_covariance(g, sc);
  const double num = sc.soi_power * std::norm(cd(w.dot(a0)));
  const double den = std::real(w.dot(rin * w));
  if (!(den > 0.0)) throw std::domain_error("output_sinr: degenerate weights");
  return num / den;
}

inline double output_sinr_db(const CVec& w, const ArrayGeometry& g, const Scenario& sc) {
  return 10.0 * std::log10(output_sinr(w, g, sc));
}

/// Analytic optimum sigma_s^2 a^H R_{i+n}^{-1} a attained by MVDR on the true
/// covariance (linear).
inline double optimal_sinr(const ArrayGeometry& g, const Scenario& sc) {
  const CVec a0 = steering_vector(g, sc.soi_direction_deg);
  const CMat rin = interference_noise_covariance(g, sc);
  const CVec rinv_a = herm_solve(rin, a0, "optimal_sinr");
  return sc.soi_power * std::real(a0.dot(rinv_a));
}

}  // namespace beamopt
