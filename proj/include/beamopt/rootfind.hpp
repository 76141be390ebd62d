#pragma once

// Safeguarded scalar root-finding: secant/Newton steps inside a maintained
// bisection bracket. Used for the Lagrange-multiplier secular equations of
// the robust beamformers.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace beamopt {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Find a root of f on [lo, hi]. Requires a sign change across the bracket.
/// Stops when |f| <= f_tol or the bracket shrinks below x_tol * max(1, |x|).
inline RootResult newton_scalar_root(const std::function<double(double)>& f, double lo, double hi,
                                     double f_tol = 1e-12, double x_tol = 1e-14,
                                     int max_iter = 200) {
  if (!(lo < hi)) throw std::invalid_argument("newton_scalar_root: invalid bracket");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::domain_error("newton_scalar_root: no sign change across bracket");

  double x = 0.5 * (lo + hi);
  double fx = f(x);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fx) <= f_tol || (hi - lo) <= x_tol * std::max(1.0, std::abs(x)))
      return {x, fx, it};
    // Shrink the bracket around the sign change.
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    // Secant proposal from the bracket endpoints; fall back to bisection when
    // it leaves the bracket or stalls.
    double cand = hi - fhi * (hi - lo) / (fhi - flo);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    // Guard against endpoint stagnation.
    const double margin = 1e-3 * (hi - lo);
    if (cand - lo < margin || hi - cand < margin) cand = 0.5 * (lo + hi);
    x = cand;
    fx = f(x);
  }
  return {x, fx, max_iter};
}

}  // namespace beamopt
