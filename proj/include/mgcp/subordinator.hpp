#pragma once

// The dependent multivariate gamma subordinator: density, transforms,
// moments, codifference, and the residuals of the two governing equations
// its Fourier transform satisfies. Dependence between coordinates enters
// through one shared negative binomial perturbation of the gamma shape.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "mgcp/special.hpp"

namespace mgcp {

// Coordinate i at time t is marginally Gamma(lambda t, (1 - theta) a_i);
// jointly the coordinates share a common NB(theta, lambda t) shape shift.
struct SubordinatorParams {
  double lambda;
  double theta;
  std::vector<double> a;

  int q() const { return static_cast<int>(a.size()); }

  void validate() const {
    if (!std::isfinite(lambda) || !(lambda > 0.0))
      throw std::invalid_argument("subordinator: lambda must be positive");
    if (!(theta > 0.0) || !(theta < 1.0))
      throw std::invalid_argument("subordinator: theta must lie in (0, 1)");
    if (a.empty())
      throw std::invalid_argument("subordinator: need at least one coordinate");
    for (double ai : a)
      if (!std::isfinite(ai) || !(ai > 0.0))
        throw std::invalid_argument("subordinator: scale entries must be positive");
  }
};

// One-dimensional clock process: unit drift plus a log-distributed compound
// Poisson part (jump size k / lambda at rate lambda theta^k / k).
struct YProcessParams {
  double lambda;
  double theta;

  void validate() const {
    if (!std::isfinite(lambda) || !(lambda > 0.0))
      throw std::invalid_argument("y process: lambda must be positive");
    if (!(theta > 0.0) || !(theta < 1.0))
      throw std::invalid_argument("y process: theta must lie in (0, 1)");
  }
};

namespace detail {

inline void check_coordinate(const SubordinatorParams& p, int i,
                             const char* who) {
  if (i < 0 || i >= p.q())
    throw std::invalid_argument(std::string(who) + ": coordinate out of range");
}

inline void check_dimension(const SubordinatorParams& p, std::size_t n,
                            const char* who) {
  if (static_cast<int>(n) != p.q())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

inline double common_scale(const SubordinatorParams& p, const char* who) {
  // Structural restriction, so the comparison is exact by intent.
  for (double ai : p.a)
    if (ai != p.a[0])
      throw std::invalid_argument(
          std::string(who) + ": coordinates must share one scale parameter");
  return p.a[0];
}

}  // namespace detail

// P{B = n} for the shared shape perturbation B ~ NB(theta, size):
// (size)_n / n! * (1 - theta)^size * theta^n.
inline double nb_pmf(double theta, double size, long long n) {
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::invalid_argument("nb_pmf: theta must lie in (0, 1)");
  if (!(size > 0.0)) throw std::invalid_argument("nb_pmf: size must be > 0");
  if (n < 0) return 0.0;
  const double nd = static_cast<double>(n);
  return std::exp(log_pochhammer(size, n) - log_gamma(nd + 1.0) +
                  size * std::log1p(-theta) + nd * std::log(theta));
}

// Joint density at x (all entries > 0) and time t > 0, as the NB-weighted
// gamma mixture series in the shared shape shift. Terms eventually decay
// like theta * prod_i(a_i x_i) / n^q, so the truncation is certified by the
// engine's geometric tail bound.
inline SeriesResult sub_pdf(const SubordinatorParams& p,
                            std::span<const double> x, double t,
                            const SeriesControl& ctl = {}) {
  p.validate();
  detail::check_dimension(p, x.size(), "sub_pdf");
  if (!(t > 0.0)) throw std::domain_error("sub_pdf: t must be > 0");
  const double lt = p.lambda * t;
  double base = lt * std::log1p(-p.theta) - log_gamma(lt);
  double log_ax = 0.0;
  for (int i = 0; i < p.q(); ++i) {
    if (!(x[i] > 0.0)) throw std::domain_error("sub_pdf: x must be > 0");
    base += -std::log(x[i]) - p.a[i] * x[i];
    log_ax += std::log(p.a[i] * x[i]);
  }
  const double log_theta = std::log(p.theta);
  const double excess = static_cast<double>(p.q() - 1);
  return sum_series(
      [&](std::size_t h) {
        const double n = static_cast<double>(h);
        return LogTerm{base + n * log_theta - log_gamma(n + 1.0) -
                           excess * log_gamma(n + lt) + (n + lt) * log_ax,
                       1};
      },
      ctl);
}

// Joint Laplace transform E exp(-<s, G(t)>) for s >= 0 componentwise.
inline double sub_lst(const SubordinatorParams& p, std::span<const double> s,
                      double t) {
  p.validate();
  detail::check_dimension(p, s.size(), "sub_lst");
  if (!(t >= 0.0)) throw std::domain_error("sub_lst: t must be >= 0");
  double prod = 1.0;
  for (int i = 0; i < p.q(); ++i) {
    if (!(s[i] >= 0.0)) throw std::domain_error("sub_lst: s must be >= 0");
    prod *= 1.0 + s[i] / p.a[i];
  }
  return std::pow((1.0 - p.theta) / (prod - p.theta), p.lambda * t);
}

inline double sub_mean(const SubordinatorParams& p, int i, double t) {
  p.validate();
  detail::check_coordinate(p, i, "sub_mean");
  if (!(t >= 0.0)) throw std::domain_error("sub_mean: t must be >= 0");
  return p.lambda * t / (p.a[i] * (1.0 - p.theta));
}

// Cov(G_i(t), G_j(t)); the shared shape shift leaves cross-covariance a
// factor theta below the variance profile.
inline double sub_cov(const SubordinatorParams& p, int i, int j, double t) {
  p.validate();
  detail::check_coordinate(p, i, "sub_cov");
  detail::check_coordinate(p, j, "sub_cov");
  if (!(t >= 0.0)) throw std::domain_error("sub_cov: t must be >= 0");
  const double om = 1.0 - p.theta;
  const double core = p.lambda * t / (p.a[i] * p.a[j] * om * om);
  return i == j ? core : p.theta * core;
}

// Codifference tau(i, j) = ln E e^{w(G_i - G_j)} - ln E e^{w G_i}
//                        - ln E e^{-w G_j},     w = sqrt(-1).
// Principal logs of the closed-form ratios, each taken before the lambda t
// scaling; all ratio arguments stay in the right half plane.
inline Complex sub_codifference(const SubordinatorParams& p, int i, int j,
                                double t) {
  p.validate();
  detail::check_coordinate(p, i, "sub_codifference");
  detail::check_coordinate(p, j, "sub_codifference");
  if (!(t >= 0.0)) throw std::domain_error("sub_codifference: t must be >= 0");
  const double lt = p.lambda * t;
  const double om = 1.0 - p.theta;
  if (i == j) {
    const double r = p.a[i] * om;
    return Complex{-lt * std::log(r * r / (r * r + 1.0)), 0.0};
  }
  const double ai = p.a[i], aj = p.a[j];
  const Complex joint =
      Complex{ai * aj * om, 0.0} / Complex{ai * aj * om + 1.0, ai - aj};
  const Complex marginals = Complex{ai * aj * om * om, 0.0} /
                            (Complex{ai * om, -1.0} * Complex{aj * om, 1.0});
  return lt * std::log(joint) - lt * std::log(marginals);
}

// Characteristic function of the one-dimensional clock at time t.
inline Complex y_char(const YProcessParams& p, double u, double t) {
  p.validate();
  if (!(t >= 0.0)) throw std::domain_error("y_char: t must be >= 0");
  const Complex e = std::exp(Complex{0.0, u / p.lambda});
  return std::exp(p.lambda * t *
                  std::log((1.0 - p.theta) * e / (1.0 - p.theta * e)));
}

// psi(alpha) = (prod_j (a - w alpha_j) - theta a^q) / ((1 - theta) a^q) for
// the equal-scale subordinator; the Fourier transform is psi^{-lambda t}.
inline Complex fourier_psi(const SubordinatorParams& p,
                           std::span<const double> alpha) {
  p.validate();
  detail::check_dimension(p, alpha.size(), "fourier_psi");
  const double a0 = detail::common_scale(p, "fourier_psi");
  Complex prod{1.0, 0.0};
  for (int j = 0; j < p.q(); ++j) prod *= Complex{a0, -alpha[j]};
  const double aq = std::pow(a0, static_cast<double>(p.q()));
  return (prod - p.theta * aq) / ((1.0 - p.theta) * aq);
}

// Joint Fourier transform E exp(w <alpha, G(t)>), equal scales only:
// exp(lambda t Log[(1 - theta) a^q / (prod_j (a - w alpha_j) - theta a^q)]).
inline Complex sub_fourier(const SubordinatorParams& p,
                           std::span<const double> alpha, double t) {
  p.validate();
  detail::check_dimension(p, alpha.size(), "sub_fourier");
  if (!(t >= 0.0)) throw std::domain_error("sub_fourier: t must be >= 0");
  const double a0 = detail::common_scale(p, "sub_fourier");
  Complex prod{1.0, 0.0};
  for (int j = 0; j < p.q(); ++j) prod *= Complex{a0, -alpha[j]};
  const double aq = std::pow(a0, static_cast<double>(p.q()));
  const Complex ratio =
      ((1.0 - p.theta) * aq) / (prod - p.theta * aq);
  return std::exp(p.lambda * t * std::log(ratio));
}

// Residual of the first governing equation, the backward relation tying the
// transform at t to its value one mean clock cycle 1/lambda earlier:
//   E(alpha) phi(t) + (1 - theta) a^q (phi(t) - phi(t - 1/lambda)) = 0,
// E(alpha) = sum_{m=1}^q a^{q-m} e_m(-w alpha_1, ..., -w alpha_q).
// Requires t > 1/lambda so the shifted time stays positive.
inline Complex de1_residual(const SubordinatorParams& p,
                            std::span<const double> alpha, double t) {
  const Complex phi_t = sub_fourier(p, alpha, t);
  if (!(t > 1.0 / p.lambda))
    throw std::domain_error("de1_residual: need t > 1/lambda");
  const Complex phi_prev = sub_fourier(p, alpha, t - 1.0 / p.lambda);
  const int q = p.q();
  const double a0 = p.a[0];
  // Elementary symmetric polynomials of z_j = -w alpha_j, one-pass update.
  std::vector<Complex> e(static_cast<std::size_t>(q) + 1, Complex{0.0, 0.0});
  e[0] = Complex{1.0, 0.0};
  for (int j = 0; j < q; ++j) {
    const Complex z{0.0, -alpha[j]};
    for (int m = std::min(j + 1, q); m >= 1; --m) e[m] += z * e[m - 1];
  }
  Complex correction{0.0, 0.0};
  for (int m = 1; m <= q; ++m)
    correction += std::pow(a0, static_cast<double>(q - m)) * e[m];
  const double aq = std::pow(a0, static_cast<double>(q));
  return correction * phi_t + (1.0 - p.theta) * aq * (phi_t - phi_prev);
}

// Residual of the second governing equation, d/dt phi + lambda D_N phi, with
// D_N the order-N truncation of the generator's logarithmic expansion. The
// truncation is assembled through the operator's nested binomial structure
// (powers of the coordinate symbols, then the inner shift, then the outer
// alternating sum), deliberately not through the closed form it telescopes
// to, so the residual exercises the same cancellations the operator does.
// Converges iff |psi - 1| < 1; outside that disk the call is rejected.
inline Complex de2_residual(const SubordinatorParams& p,
                            std::span<const double> alpha, double t,
                            int order) {
  if (order < 1) throw std::invalid_argument("de2_residual: order must be >= 1");
  const Complex psi = fourier_psi(p, alpha);
  if (!(std::abs(psi - Complex{1.0, 0.0}) < 1.0))
    throw std::domain_error(
        "de2_residual: expansion diverges, |psi - 1| must be < 1");
  const Complex phi = sub_fourier(p, alpha, t);
  const Complex dphi_dt = -p.lambda * std::log(psi) * phi;

  using CL = std::complex<long double>;
  const int q = p.q();
  const long double a0 = static_cast<long double>(p.a[0]);
  long double aq = 1.0L;
  for (int j = 0; j < q; ++j) aq *= a0;
  const long double b1 = (1.0L - static_cast<long double>(p.theta)) * aq;
  const long double b2 = static_cast<long double>(p.theta) * aq;

  // Pascal triangle and the power tables the nested sums draw from.
  std::vector<std::vector<long double>> choose(
      static_cast<std::size_t>(order) + 1);
  for (int n = 0; n <= order; ++n) {
    choose[n].assign(static_cast<std::size_t>(n) + 1, 1.0L);
    for (int k = 1; k < n; ++k)
      choose[n][k] = choose[n - 1][k - 1] + choose[n - 1][k];
  }
  std::vector<long double> apow(static_cast<std::size_t>(order) + 1, 1.0L);
  std::vector<long double> nb2pow(apow), b1pow(apow);
  for (int m = 1; m <= order; ++m) {
    apow[m] = apow[m - 1] * a0;
    nb2pow[m] = nb2pow[m - 1] * (-b2);
    b1pow[m] = b1pow[m - 1] * b1;
  }
  // prod_over_coords[l] = prod_j P_j(l), P_j(l) = sum_m C(l,m) a^m z_j^{l-m},
  // z_j = -w alpha_j.
  std::vector<CL> prod_over_coords(static_cast<std::size_t>(order) + 1,
                                   CL{1.0L, 0.0L});
  for (int j = 0; j < q; ++j) {
    const CL z{0.0L, -static_cast<long double>(alpha[j])};
    std::vector<CL> zpow(static_cast<std::size_t>(order) + 1, CL{1.0L, 0.0L});
    for (int m = 1; m <= order; ++m) zpow[m] = zpow[m - 1] * z;
    for (int l = 0; l <= order; ++l) {
      CL pj{0.0L, 0.0L};
      for (int m = 0; m <= l; ++m) pj += choose[l][m] * apow[m] * zpow[l - m];
      prod_over_coords[l] *= pj;
    }
  }
  // inner(k) = sum_l C(k,l) (-b2)^{k-l} prod_j P_j(l).
  std::vector<CL> inner(static_cast<std::size_t>(order) + 1, CL{0.0L, 0.0L});
  for (int k = 0; k <= order; ++k)
    for (int l = 0; l <= k; ++l)
      inner[k] += choose[k][l] * nb2pow[k - l] * prod_over_coords[l];
  // D_N = sum_{n=1}^N (-1)^{n+1}/n sum_{k=0}^n C(n,k) (-1)^{n-k} inner(k)/b1^k.
  CL dN{0.0L, 0.0L};
  for (int n = 1; n <= order; ++n) {
    CL mid{0.0L, 0.0L};
    for (int k = 0; k <= n; ++k) {
      const long double sgn = ((n - k) % 2 == 0) ? 1.0L : -1.0L;
      mid += sgn * choose[n][k] * inner[k] / b1pow[k];
    }
    const long double outer = (n % 2 == 1 ? 1.0L : -1.0L) /
                              static_cast<long double>(n);
    dN += outer * mid;
  }
  const Complex generator{static_cast<double>(dN.real()),
                          static_cast<double>(dN.imag())};
  return dphi_dt + p.lambda * generator * phi;
}

}  // namespace mgcp
