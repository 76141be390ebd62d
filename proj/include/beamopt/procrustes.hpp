#pragma once

// Orthogonal Procrustes with row-orthonormal unknown: minimize ||B - A P||_F
// over P with P P^H = I. Closed form from the SVD of A^H B.

#include <stdexcept>

#include "beamopt/linalg.hpp"

namespace beamopt {

/// A is K x p, B is K x q, p <= q; returns the p x q minimizer with
/// orthonormal rows. ||A P||_F is constant on the constraint set, so the
/// problem reduces to max Re tr(P^H A^H B) = U V^H with A^H B = U S V^H.
inline CMat orthogonal_procrustes(const CMat& A, const CMat& B) {
  if (A.rows() != B.rows())
    throw std::invalid_argument("orthogonal_procrustes: A and B need the same row count");
  const Eigen::Index p = A.cols();
  const Eigen::Index q = B.cols();
  if (p > q)
    throw std::invalid_argument(
        "orthogonal_procrustes: P P^H = I requires cols(A) <= cols(B)");
  const CMat G = A.adjoint() * B;  // p x q
  Eigen::JacobiSVD<CMat> svd(G, Eigen::ComputeFullU | Eigen::ComputeThinV);
  // Full U (p x p) with thin V (q x p) keeps P P^H = I even when G is
  // rank-deficient.
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace beamopt
