#pragma once

// Shared linear-algebra aliases and small helpers used across the toolkit.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace beamopt {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double speed_of_light = 299792458.0;  // m/s

inline double deg2rad(double deg) { return deg * pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / pi; }

/// Relative conditioning gate used before every Hermitian solve: a matrix is
/// treated as numerically singular when min-eig <= 1e-12 * max-eig.
inline void check_hermitian_pd(const CMat& R, const std::string& who) {
  Eigen::SelfAdjointEigenSolver<CMat> es(R, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-12 * hi) || !(hi > 0.0)) {
    throw std::domain_error(who +
                            ": covariance is numerically singular "
                            "(min eigenvalue <= 1e-12 * max); consider diagonal "
                            "loading, e.g. the lsmi beamformer");
  }
}

/// Solve R X = B for Hermitian positive-definite R via Cholesky, after the
/// conditioning gate above.
inline CMat herm_solve(const CMat& R, const CMat& B, const std::string& who) {
  check_hermitian_pd(R, who);
  return Eigen::LLT<CMat>(R).solve(B);
}

/// Deterministic phase convention for eigen/singular vectors: rotate so the
/// largest-magnitude entry is real and positive.
inline CVec fix_phase(const CVec& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const cd pivot = v(k);
  if (std::abs(pivot) == 0.0) return v;
  return v * (std::abs(pivot) / pivot);
}

/// Principal eigenvector (largest eigenvalue) of a Hermitian matrix, with the
/// deterministic phase convention. Also reports the top-two eigenvalues.
struct PrincipalPair {
  CVec vector;
  double value = 0.0;
  double second = 0.0;
};

inline PrincipalPair principal_eigenvector(const CMat& H) {
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("principal_eigenvector: eigensolver failed");
  const Eigen::Index n = H.rows();
  PrincipalPair out;
  out.vector = fix_phase(es.eigenvectors().col(n - 1));
  out.value = es.eigenvalues()(n - 1);
  out.second = n > 1 ? es.eigenvalues()(n - 2) : 0.0;
  return out;
}

}  // namespace beamopt
