#pragma once

// Riemannian gradient descent on the product of scaled circles: every entry
// of the point keeps a fixed modulus (1/sqrt(N) for analog precoders).
// Armijo backtracking line search with entrywise renormalization retraction.

#include <functional>
#include <stdexcept>
#include <vector>

#include "beamopt/linalg.hpp"

namespace beamopt {

/// Point on the constant-modulus manifold: complex matrix with all entries of
/// equal modulus `radius`.
struct UnitModulusPoint {
  CMat entries;
  double radius = 1.0;

  static UnitModulusPoint from(const CMat& x) {
    if (x.size() == 0) throw std::invalid_argument("UnitModulusPoint: empty point");
    UnitModulusPoint p;
    p.radius = std::abs(x(0, 0));
    if (!(p.radius > 0.0))
      throw std::invalid_argument("UnitModulusPoint: entries must be nonzero");
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (std::abs(std::abs(x(i, j)) - p.radius) > 1e-9 * p.radius)
          throw std::invalid_argument("UnitModulusPoint: entries must share one modulus");
    p.entries = x;
    return p;
  }
};

/// Cost callback: returns (cost, Euclidean gradient) at X. The gradient is the
/// plain R^{2mn} gradient identified with a complex matrix (e.g. 2 A^H (A x -
/// b) for ||A x - b||^2).
using ManifoldCost = std::function<std::pair<double, CMat>(const CMat&)>;

struct ManifoldOptions {
  int max_iter = 500;
  double grad_tol = 1e-8;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  int max_backtracks = 40;
};

struct ManifoldResult {
  UnitModulusPoint point;
  double cost = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  std::vector<double> trace;  // cost after each accepted step
};

inline CMat retract_modulus(const CMat& x, double radius) {
  CMat y = x;
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double m = std::abs(y(i, j));
      y(i, j) = m > 0.0 ? y(i, j) * (radius / m) : cd(radius, 0.0);
    }
  return y;
}

/// Project a Euclidean gradient onto the tangent space of the product of
/// circles at X: remove the radial component entrywise.
inline CMat tangent_project(const CMat& x, const CMat& egrad, double radius) {
  CMat t = egrad;
  const double r2 = radius * radius;
  for (Eigen::Index j = 0; j < t.cols(); ++j)
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      const double radial = std::real(egrad(i, j) * std::conj(x(i, j))) / r2;
      t(i, j) -= radial * x(i, j);
    }
  return t;
}

inline ManifoldResult manifold_minimize(const ManifoldCost& cost, const UnitModulusPoint& x0,
                                        const ManifoldOptions& opts = {}) {
  CMat x = x0.entries;
  const double radius = x0.radius;
  auto [f, egrad] = cost(x);
  CMat rgrad = tangent_project(x, egrad, radius);

  ManifoldResult out;
  out.trace.push_back(f);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double gn2 = rgrad.squaredNorm();
    if (std::sqrt(gn2) <= opts.grad_tol) break;
    double alpha = opts.initial_step;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      const CMat cand = retract_modulus(x - alpha * rgrad, radius);
      const auto [fc, gc] = cost(cand);
      if (fc <= f - opts.armijo_c * alpha * gn2) {
        x = cand;
        f = fc;
        egrad = gc;
        rgrad = tangent_project(x, egrad, radius);
        accepted = true;
        break;
      }
      alpha *= opts.backtrack;
    }
    if (!accepted) break;  // no further decrease resolvable at this scale
    out.trace.push_back(f);
  }
  out.point.entries = x;
  out.point.radius = radius;
  out.cost = f;
  out.grad_norm = rgrad.norm();
  out.iterations = it;
  return out;
}

}  // namespace beamopt
