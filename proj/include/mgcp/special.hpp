#pragma once

// Log-domain special functions and the truncated-series engine shared by all
// analytic evaluators in this library.
//
// Convention used throughout: a series term is carried as sign * exp(log_abs)
// so that Pochhammer ratios and factorials never overflow a double. Every
// in-scope series has eventually geometrically decreasing terms; the engine
// certifies truncation with a geometric tail bound taken from the last
// observed term ratio.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace mgcp {

using Complex = std::complex<double>;

struct SeriesControl {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  std::size_t max_terms = 100000;
  // Consecutive sub-tolerance terms required before declaring convergence;
  // guards against series whose early terms dip before growing again.
  int decreasing_run = 3;
};

// One series term, sign in {-1, 0, +1}; sign == 0 means the term is exactly
// zero, which the engine reads as "the series has terminated".
struct LogTerm {
  double log_abs;
  int sign;
};

struct SeriesResult {
  double value = 0.0;
  std::size_t terms_used = 0;
  double tail_bound = 0.0;
};

class SeriesNonConvergence : public std::runtime_error {
 public:
  SeriesNonConvergence(const std::string& what, double partial,
                       std::size_t terms)
      : std::runtime_error(what), partial_sum(partial), terms_used(terms) {}
  double partial_sum;
  std::size_t terms_used;
};

// Neumaier-compensated accumulator; the correction also rescues additions
// whose magnitude exceeds the running sum.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

// Lanczos approximation, g = 7, 9 coefficients. Relative error of the
// resulting ln Gamma is a few 1e-16 over the positive axis, comfortably
// inside the 1e-14 contract.
inline constexpr double kLanczosG = 7.0;
inline constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
inline constexpr double kHalfLog2Pi = 0.91893853320467274178;  // ln(2*pi)/2

}  // namespace detail

// ln Gamma(x) for x > 0. Arguments below 0.5 are shifted up through
// Gamma(x) = Gamma(x+1)/x before the Lanczos core is applied.
inline double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be > 0");
  double shift = 0.0;
  while (x < 0.5) {
    shift -= std::log(x);
    x += 1.0;
  }
  const double z = x - 1.0;
  double s = detail::kLanczos[0];
  for (int i = 1; i < 9; ++i) s += detail::kLanczos[i] / (z + i);
  const double t = z + detail::kLanczosG + 0.5;
  return detail::kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(s) +
         shift;
}

// ln (x)_k, rising factorial. Short products are summed directly (cheaper
// and slightly sharper than differencing two large ln Gamma values).
inline double log_pochhammer(double x, long long k) {
  if (!(x > 0.0))
    throw std::domain_error("log_pochhammer: base must be > 0");
  if (k < 0) throw std::domain_error("log_pochhammer: k must be >= 0");
  if (k == 0) return 0.0;
  if (k <= 16) {
    double s = 0.0;
    for (long long i = 0; i < k; ++i) s += std::log(x + static_cast<double>(i));
    return s;
  }
  return log_gamma(x + static_cast<double>(k)) - log_gamma(x);
}

// ln C(top, k) with real top; requires both Gamma arguments positive, which
// every call site guarantees (top = n + lambda*t - 1 with positive lambda*t).
inline double log_real_binomial(double top, long long k) {
  if (k < 0) throw std::domain_error("log_real_binomial: k must be >= 0");
  const double kk = static_cast<double>(k);
  if (!(top + 1.0 > 0.0) || !(top - kk + 1.0 > 0.0))
    throw std::domain_error(
        "log_real_binomial: arguments leave the positive Gamma domain");
  return log_gamma(top + 1.0) - log_gamma(kk + 1.0) - log_gamma(top - kk + 1.0);
}

namespace detail {

inline bool is_nonpositive_integer(double a) {
  return std::isfinite(a) && a <= 0.0 && a == std::floor(a);
}

}  // namespace detail

// Terminating 3F2 at unit argument: sum_m (a1)_m (a2)_m (a3)_m /
// ((b1)_m (b2)_m m!). At least one upper parameter must be a nonpositive
// integer; convergence of the non-terminating series is never assumed.
inline double hyp3f2_terminating(double a1, double a2, double a3, double b1,
                                 double b2) {
  long long stop = -1;
  for (double a : {a1, a2, a3}) {
    if (detail::is_nonpositive_integer(a)) {
      const long long m = static_cast<long long>(-a);
      if (stop < 0 || m < stop) stop = m;
    }
  }
  if (stop < 0)
    throw std::invalid_argument(
        "hyp3f2_terminating: no nonpositive-integer upper parameter, series "
        "does not terminate");
  for (double b : {b1, b2}) {
    if (detail::is_nonpositive_integer(b) &&
        static_cast<long long>(-b) < stop)
      throw std::domain_error(
          "hyp3f2_terminating: lower parameter reaches a pole before the "
          "series terminates");
  }
  long double sum = 1.0L, term = 1.0L;
  for (long long m = 0; m < stop; ++m) {
    const long double md = static_cast<long double>(m);
    term *= (a1 + md) * (a2 + md) * (a3 + md);
    term /= (b1 + md) * (b2 + md) * (md + 1.0L);
    sum += term;
  }
  return static_cast<double>(sum);
}

// Sums term_at(0) + term_at(1) + ... until `decreasing_run` consecutive terms
// fall below max(abs_tol, rel_tol * |partial sum|). An exactly-zero term
// (sign == 0) terminates the series on the spot. The returned tail bound is
// the geometric extrapolation of the last term at the last observed ratio,
// inflated by a hair to stay an upper bound under rounding.
template <typename TermFn>
SeriesResult sum_series(TermFn&& term_at, const SeriesControl& ctl = {}) {
  KahanSum acc;
  int run = 0;
  double prev_abs = -1.0, ratio = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t h = 0; h < ctl.max_terms; ++h) {
    const LogTerm lt = term_at(h);
    if (lt.sign == 0 || lt.log_abs == -std::numeric_limits<double>::infinity())
      return {acc.value(), h + 1, 0.0};
    const double abs_t = std::exp(lt.log_abs);
    acc.add(lt.sign > 0 ? abs_t : -abs_t);
    if (prev_abs > 0.0) ratio = abs_t / prev_abs;
    prev_abs = abs_t;
    const double tol = std::max(ctl.abs_tol, ctl.rel_tol *
                                                 std::fabs(acc.value()));
    if (abs_t <= tol) {
      if (++run >= ctl.decreasing_run) {
        double bound = std::numeric_limits<double>::infinity();
        if (std::isnan(ratio))
          bound = 0.0;  // single-term series
        else if (ratio < 1.0)
          bound = abs_t * ratio / (1.0 - ratio) * (1.0 + 1e-9) +
                  1e-300;
        return {acc.value(), h + 1, bound};
      }
    } else {
      run = 0;
    }
  }
  throw SeriesNonConvergence(
      "sum_series: no convergence within max_terms = " +
          std::to_string(ctl.max_terms),
      acc.value(), ctl.max_terms);
}

}  // namespace mgcp
