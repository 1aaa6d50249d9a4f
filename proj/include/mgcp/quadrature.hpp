#pragma once

// Adaptive Simpson quadrature with Richardson acceptance. Used for density
// normalization checks, transform cross-checks, and the failure-time
// integrals; integrands are smooth apart from possible endpoint cusps.

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace mgcp {

struct QuadratureControl {
  double abs_tol = 1e-9;
  int max_depth = 40;
  // Bisection levels forced before acceptance is allowed. Integrands here
  // often concentrate their mass in a small part of the interval; without a
  // floor the opening stencil can miss the bump entirely and accept zero.
  int min_depth = 4;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

template <typename Fn>
double simpson_step(Fn&& f, double a, double fa, double b, double fb,
                    double& fm, QuadratureResult& out) {
  const double m = 0.5 * (a + b);
  fm = f(m);
  ++out.evaluations;
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename Fn>
double adaptive_simpson_rec(Fn&& f, double a, double fa, double m, double fm,
                            double b, double fb, double whole, double tol,
                            int depth, int min_remaining,
                            QuadratureResult& out) {
  double fl, fr;
  const double left = simpson_step(f, a, fa, m, fm, fl, out);
  const double right = simpson_step(f, m, fm, b, fb, fr, out);
  const double delta = left + right - whole;
  if (depth <= 0 ||
      (min_remaining <= 0 && std::fabs(delta) <= 15.0 * tol)) {
    out.error_estimate += std::fabs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  return adaptive_simpson_rec(f, a, fa, lm, fl, m, fm, left, 0.5 * tol,
                              depth - 1, min_remaining - 1, out) +
         adaptive_simpson_rec(f, m, fm, rm, fr, b, fb, right, 0.5 * tol,
                              depth - 1, min_remaining - 1, out);
}

}  // namespace detail

// Integrates f over [a, b]. The error estimate is the sum of the accepted
// Richardson increments; it is a heuristic, not a rigorous bound, and is
// reliable only where the integrand is smooth at the working scale.
template <typename Fn>
QuadratureResult adaptive_simpson(Fn&& f, double a, double b,
                                  const QuadratureControl& ctl = {}) {
  if (!(b >= a))
    throw std::invalid_argument("adaptive_simpson: need b >= a");
  QuadratureResult out;
  if (a == b) return out;
  const double fa = f(a), fb = f(b);
  out.evaluations = 2;
  double fm;
  const double whole = detail::simpson_step(f, a, fa, b, fb, fm, out);
  out.value = detail::adaptive_simpson_rec(
      f, a, fa, 0.5 * (a + b), fm, b, fb, whole, ctl.abs_tol, ctl.max_depth,
      ctl.min_depth, out);
  return out;
}

}  // namespace mgcp
