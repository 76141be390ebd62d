#pragma once

// Dense ADMM solver for cone programs
//
//     minimize    c^T x
//     subject to  A x + s = b,   s in K,
//
// where K is a product of zero, nonnegative, second-order, and PSD cones.
// Small dense problems only (the SDR liftings and SOCPs in this toolkit are a
// few hundred variables at most). The x-step carries a small proximal term so
// the KKT matrix sigma I + rho A^T A is SPD without any rank assumption on A.
//
// PSD blocks act on svec'd real symmetric matrices (sqrt(2)-scaled off
// diagonals, so the cone is self-dual under the Euclidean inner product).
// Complex Hermitian constraints enter through the standard [[Re, -Im], [Im,
// Re]] embedding; helpers for that live at the bottom of this header.

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamopt/linalg.hpp"

namespace beamopt {

struct ConeSpec {
  enum Kind { Zero, NonNeg, Soc, Psd };
  Kind kind = Zero;
  int dim = 0;  // vector length for Zero/NonNeg/Soc; matrix side for Psd

  int vec_dim() const { return kind == Psd ? dim * (dim + 1) / 2 : dim; }
};

struct ConicProblem {
  RVec c;
  RMat A;
  RVec b;
  std::vector<ConeSpec> cones;
};

struct ConicSettings {
  double tol = 1e-6;
  int max_iter = 50000;
  double rho = 1.0;
  double sigma = 1e-6;
  bool adapt_rho = true;       // residual balancing, factor 2, every 50 iters
  int check_every = 5;
  std::string debug_csv;       // when set, dump residual history as CSV
};

enum class ConicStatus { Optimal, MaxIterations, Infeasible };

struct ConicSolution {
  RVec x, s, y;
  ConicStatus status = ConicStatus::MaxIterations;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

// ---- symmetric vectorization -------------------------------------------------

inline int svec_dim(int n) { return n * (n + 1) / 2; }

/// Column-major lower triangle; off-diagonal entries scaled by sqrt(2) so that
/// <svec(X), svec(Y)> = <X, Y>_F.
inline RVec svec(const RMat& x) {
  const int n = int(x.rows());
  RVec v(svec_dim(n));
  const double rt2 = std::sqrt(2.0);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    v(k++) = x(j, j);
    for (int i = j + 1; i < n; ++i) v(k++) = rt2 * 0.5 * (x(i, j) + x(j, i));
  }
  return v;
}

inline RMat smat(const RVec& v, int n) {
  RMat x(n, n);
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    x(j, j) = v(k++);
    for (int i = j + 1; i < n; ++i) {
      const double w = inv_rt2 * v(k++);
      x(i, j) = w;
      x(j, i) = w;
    }
  }
  return x;
}

// ---- projections -------------------------------------------------------------

/// Nearest (Frobenius) real symmetric PSD matrix: symmetrize, eigendecompose,
/// clamp negative eigenvalues.
inline RMat psd_project(const RMat& s) {
  const RMat sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("psd_project: eigensolver failed");
  RVec lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

/// Complex Hermitian variant.
inline CMat psd_project(const CMat& s) {
  const CMat herm = 0.5 * (s + s.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(herm);
  if (es.info() != Eigen::Success) throw std::runtime_error("psd_project: eigensolver failed");
  RVec lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

inline void project_cone_block(RVec& v, const ConeSpec& cone) {
  switch (cone.kind) {
    case ConeSpec::Zero:
      v.setZero();
      break;
    case ConeSpec::NonNeg:
      v = v.cwiseMax(0.0);
      break;
    case ConeSpec::Soc: {
      if (cone.dim < 1) break;
      const double t = v(0);
      const double xn = cone.dim > 1 ? v.tail(cone.dim - 1).norm() : 0.0;
      if (xn <= t) break;            // inside
      if (xn <= -t) {                // polar interior
        v.setZero();
        break;
      }
      const double alpha = 0.5 * (t + xn);
      v(0) = alpha;
      if (xn > 0.0) v.tail(cone.dim - 1) *= alpha / xn;
      break;
    }
    case ConeSpec::Psd:
      v = svec(psd_project(smat(v, cone.dim)));
      break;
  }
}

inline void project_cone(RVec& v, const std::vector<ConeSpec>& cones) {
  int off = 0;
  for (const auto& cone : cones) {
    const int d = cone.vec_dim();
    RVec block = v.segment(off, d);
    project_cone_block(block, cone);
    v.segment(off, d) = block;
    off += d;
  }
}

// ---- ADMM --------------------------------------------------------------------

inline ConicSolution conic_solve(const ConicProblem& prob, const ConicSettings& opts = {}) {
  const int n = int(prob.c.size());
  const int m = int(prob.b.size());
  if (prob.A.rows() != m || prob.A.cols() != n)
    throw std::invalid_argument("conic_solve: A is " + std::to_string(prob.A.rows()) + "x" +
                                std::to_string(prob.A.cols()) + ", expected " + std::to_string(m) +
                                "x" + std::to_string(n));
  int cone_total = 0;
  for (const auto& cone : prob.cones) cone_total += cone.vec_dim();
  if (cone_total != m)
    throw std::invalid_argument("conic_solve: cone dimensions sum to " +
                                std::to_string(cone_total) + ", expected " + std::to_string(m));

  double rho = opts.rho;
  const double sigma = opts.sigma;
  const RMat ata = prob.A.transpose() * prob.A;
  Eigen::LDLT<RMat> kkt(sigma * RMat::Identity(n, n) + rho * ata);

  RVec x = RVec::Zero(n);
  RVec z = RVec::Zero(m);
  RVec u = RVec::Zero(m);

  const double bnorm = prob.b.norm();
  const double cnorm = prob.c.norm();

  std::FILE* dbg = nullptr;
  if (!opts.debug_csv.empty()) {
    dbg = std::fopen(opts.debug_csv.c_str(), "w");
    if (dbg) std::fprintf(dbg, "iter,rho,primal_residual,dual_residual,gap\n");
  }

  ConicSolution sol;
  sol.status = ConicStatus::MaxIterations;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // x-step: (sigma I + rho A^T A) x+ = sigma x - c + rho A^T (b - z - u)
    const RVec rhs = sigma * x - prob.c + rho * (prob.A.transpose() * (prob.b - z - u));
    x = kkt.solve(rhs);
    // z-step: project b - Ax - u onto K
    const RVec ax = prob.A * x;
    z = prob.b - ax - u;
    project_cone(z, prob.cones);
    // dual update
    u += ax + z - prob.b;

    const bool check = (it % opts.check_every == 0) || it == opts.max_iter - 1;
    if (!check) continue;

    const RVec y = rho * u;
    const double pres = (ax + z - prob.b).norm() / (1.0 + bnorm);
    const double dres = (prob.A.transpose() * y + prob.c).norm() / (1.0 + cnorm);
    const double pobj = prob.c.dot(x);
    const double dobj = -prob.b.dot(y);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (dbg) std::fprintf(dbg, "%d,%.6e,%.6e,%.6e,%.6e\n", it, rho, pres, dres, gap);

    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.gap = gap;
    if (pres < opts.tol && dres < opts.tol && gap < opts.tol) {
      sol.status = ConicStatus::Optimal;
      ++it;
      break;
    }

    // Primal infeasibility certificate: y with A^T y ~ 0 and b^T y < 0.
    const double bty = prob.b.dot(y);
    if (it > 200 && bty < -1e-9) {
      const RVec yhat = y / (-bty);
      if ((prob.A.transpose() * yhat).norm() < 1e-9) {
        sol.status = ConicStatus::Infeasible;
        ++it;
        break;
      }
    }

    // Residual balancing on rho (factor 2, every 50 iterations); the scaled
    // dual must shrink/grow inversely so y = rho u is continuous.
    if (opts.adapt_rho && it > 0 && it % 50 == 0) {
      double factor = 1.0;
      if (pres > 10.0 * dres)
        factor = 2.0;
      else if (dres > 10.0 * pres)
        factor = 0.5;
      if (factor != 1.0) {
        const double next = std::min(1e6, std::max(1e-6, rho * factor));
        if (next != rho) {
          u *= rho / next;
          rho = next;
          kkt.compute(sigma * RMat::Identity(n, n) + rho * ata);
        }
      }
    }
  }

  if (dbg) std::fclose(dbg);
  sol.x = x;
  sol.s = z;
  sol.y = rho * u;
  sol.objective = prob.c.dot(x);
  sol.iterations = it;
  return sol;
}

// ---- complex -> real embedding helpers ----------------------------------------

/// Real coefficient row for Re(q^H w) with w stacked as [Re w; Im w].
inline RVec re_inner_row(const CVec& q) {
  const int n = int(q.size());
  RVec row(2 * n);
  row.head(n) = q.real();
  row.tail(n) = q.imag();
  return row;
}

/// Real coefficient row for Im(q^H w).
inline RVec im_inner_row(const CVec& q) {
  const int n = int(q.size());
  RVec row(2 * n);
  row.head(n) = -q.imag();
  row.tail(n) = q.real();
  return row;
}

/// Real block [[Re M, -Im M], [Im M, Re M]] mapping [Re w; Im w] to
/// [Re(Mw); Im(Mw)].
inline RMat complex_op_block(const CMat& m) {
  const int r = int(m.rows());
  const int c = int(m.cols());
  RMat out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = m.real();
  out.topRightCorner(r, c) = -m.imag();
  out.bottomLeftCorner(r, c) = m.imag();
  out.bottomRightCorner(r, c) = m.real();
  return out;
}

/// Real symmetric embedding of a Hermitian matrix; X >= 0 iff embed(X) >= 0.
/// Note tr(embed(X)) = 2 tr(X).
inline RMat hermitian_embed(const CMat& x) { return complex_op_block(x); }

/// Real parameterization of an n x n complex Hermitian variable:
/// n diagonal entries, then (Re, Im) pairs of the strict upper triangle in
/// column-major order. Used to pose SDR liftings over real ADMM variables.
struct HermitianVariable {
  int n = 0;

  explicit HermitianVariable(int side) : n(side) {}

  int param_count() const { return n * n; }

  /// Basis matrix for parameter k (so that A(p) = sum_k p_k basis(k)).
  CMat basis(int k) const {
    CMat h = CMat::Zero(n, n);
    if (k < n) {
      h(k, k) = 1.0;
      return h;
    }
    int idx = k - n;
    const bool is_imag = idx % 2 == 1;
    idx /= 2;
    // Column-major strict upper triangle: (i, j) with i < j.
    int count = 0;
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i, ++count)
        if (count == idx) {
          if (is_imag) {
            h(i, j) = cd(0.0, 1.0);
            h(j, i) = cd(0.0, -1.0);
          } else {
            h(i, j) = 1.0;
            h(j, i) = 1.0;
          }
          return h;
        }
    throw std::out_of_range("HermitianVariable::basis");
  }

  /// Coefficients of the real linear functional p -> tr(Q A(p)) for Hermitian Q.
  RVec trace_row(const CMat& q) const {
    RVec row(param_count());
    for (int k = 0; k < n; ++k) row(k) = std::real(q(k, k));
    int idx = n;
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i) {
        row(idx++) = 2.0 * std::real(q(i, j));
        row(idx++) = 2.0 * std::imag(q(i, j));
      }
    return row;
  }

  /// Columns of the map p -> svec(embed(A(p))) for the PSD block.
  RMat embed_map() const {
    const int rows = svec_dim(2 * n);
    RMat map(rows, param_count());
    for (int k = 0; k < param_count(); ++k) map.col(k) = svec(hermitian_embed(basis(k)));
    return map;
  }

  /// Reassemble the Hermitian matrix from a parameter vector.
  CMat unpack(const RVec& p) const {
    CMat a = CMat::Zero(n, n);
    for (int k = 0; k < n; ++k) a(k, k) = p(k);
    int idx = n;
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i) {
        a(i, j) = cd(p(idx), p(idx + 1));
        a(j, i) = std::conj(a(i, j));
        idx += 2;
      }
    return a;
  }
};

}  // namespace beamopt
