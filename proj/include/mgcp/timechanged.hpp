#pragma once

// The counting process run on the dependent gamma clock: component i of the
// multivariate generalized counting process evaluated at coordinate i of the
// subordinator. State probabilities, pgf, Levy measure, moments and
// codifference, plus the independent-clock variant (plain gamma time changes
// with no shared shock) whose pmf factorizes over components.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgcp/compositions.hpp"
#include "mgcp/gcp.hpp"
#include "mgcp/special.hpp"
#include "mgcp/subordinator.hpp"

namespace mgcp {

struct TcModelParams {
  MultiGcpParams gcp;
  SubordinatorParams sub;

  int q() const { return sub.q(); }

  void validate() const {
    gcp.validate();
    sub.validate();
    if (gcp.q() != sub.q())
      throw std::invalid_argument(
          "time-changed model: counting and subordinator dimensions differ");
  }
};

namespace detail {

// Per-component inner-sum data, h-independent, reused across every term of an
// h-series: eta and log weight of each jump configuration reaching n, plus
// ln rho = ln(a / (a + total rate)).
struct ComponentTerms {
  std::vector<long long> eta;
  std::vector<double> logw;
  double log_rho;
};

inline ComponentTerms component_terms(const GcpParams& g, double a,
                                      long long n) {
  ComponentTerms out;
  const double denom = a + g.total_rate();
  out.log_rho = std::log(a / denom);
  const double log_denom = std::log(denom);
  for_each_composition(
      g.k(), n, [&](const std::vector<int>& parts, int eta) {
        double lw = 0.0;
        for (std::size_t j = 0; j < parts.size(); ++j) {
          if (parts[j] == 0) continue;
          lw += parts[j] * (std::log(g.rates[j]) - log_denom) -
                log_gamma(static_cast<double>(parts[j]) + 1.0);
        }
        out.eta.push_back(eta);
        out.logw.push_back(lw);
      });
  return out;
}

// ln sum_c exp(lpoch(shape, eta_c) + logw_c), streaming log-sum-exp so large
// eta never overflows. Returns -inf when every configuration has zero weight.
inline double log_inner_sum(const ComponentTerms& ct, double shape) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double best = kNegInf, scaled = 0.0;
  for (std::size_t c = 0; c < ct.eta.size(); ++c) {
    const double e = log_pochhammer(shape, ct.eta[c]) + ct.logw[c];
    if (e == kNegInf) continue;
    if (e > best) {
      scaled = scaled * std::exp(best - e) + 1.0;
      best = e;
    } else {
      scaled += std::exp(e - best);
    }
  }
  return best == kNegInf ? kNegInf : best + std::log(scaled);
}

inline void check_state_dimension(const TcModelParams& p, std::size_t n,
                                  const char* who) {
  if (static_cast<int>(n) != p.q())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace detail

// P{state = n at time t}: the h-series over the shared negative binomial
// shape shift, each term carrying the product of per-component inner sums
// over jump configurations. Log-space terms; geometric tail certificate with
// limiting ratio theta * prod_i rho_i.
inline SeriesResult tc_pmf(const TcModelParams& p,
                           std::span<const long long> n, double t,
                           const SeriesControl& ctl = {}) {
  p.validate();
  detail::check_state_dimension(p, n.size(), "tc_pmf");
  if (!(t >= 0.0)) throw std::domain_error("tc_pmf: t must be >= 0");
  bool at_origin = true;
  for (long long ni : n) {
    if (ni < 0) return {0.0, 0, 0.0};
    if (ni > 0) at_origin = false;
  }
  if (t == 0.0) return {at_origin ? 1.0 : 0.0, 0, 0.0};
  const double lt = p.sub.lambda * t;
  std::vector<detail::ComponentTerms> comp;
  comp.reserve(n.size());
  double sum_log_rho = 0.0;
  for (int i = 0; i < p.q(); ++i) {
    comp.push_back(
        detail::component_terms(p.gcp.components[i], p.sub.a[i], n[i]));
    sum_log_rho += comp.back().log_rho;
  }
  const double log_theta = std::log(p.sub.theta);
  const double base = lt * std::log1p(-p.sub.theta);
  return sum_series(
      [&](std::size_t h) {
        const double hd = static_cast<double>(h);
        double log_abs = base + hd * log_theta +
                         log_pochhammer(lt, static_cast<long long>(h)) -
                         log_gamma(hd + 1.0) + (hd + lt) * sum_log_rho;
        for (const auto& c : comp)
          log_abs += detail::log_inner_sum(c, lt + hd);
        return LogTerm{log_abs, 1};
      },
      ctl);
}

// pmf of the independent-clock variant for one component: the counting
// component at a plain Gamma(lambda t, a_i) time. Finite configuration sum,
// no shared-shift series.
inline double mz_pmf_component(const TcModelParams& p, int i, long long n,
                               double t) {
  p.validate();
  if (i < 0 || i >= p.q())
    throw std::invalid_argument("mz_pmf_component: component out of range");
  if (!(t >= 0.0))
    throw std::domain_error("mz_pmf_component: t must be >= 0");
  if (n < 0) return 0.0;
  if (t == 0.0) return n == 0 ? 1.0 : 0.0;
  const double lt = p.sub.lambda * t;
  const auto ct = detail::component_terms(p.gcp.components[i], p.sub.a[i], n);
  const double inner = detail::log_inner_sum(ct, lt);
  if (inner == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(lt * ct.log_rho + inner);
}

// Joint pmf of the independent-clock variant: the clocks share nothing, so
// the state probability is the product of the component factors.
inline double mz_pmf(const TcModelParams& p, std::span<const long long> n,
                     double t) {
  p.validate();
  detail::check_state_dimension(p, n.size(), "mz_pmf");
  double prod = 1.0;
  for (int i = 0; i < p.q(); ++i) prod *= mz_pmf_component(p, i, n[i], t);
  return prod;
}

// Probability generating function E prod_i u_i^{N_i(t)} for |u_i| <= 1:
// ((1 - theta) / (prod_i D_i - theta))^{lambda t},
// D_i = 1 + sum_j lambda_ij (1 - u_i^j) / a_i.
inline double tc_pgf(const TcModelParams& p, std::span<const double> u,
                     double t) {
  p.validate();
  detail::check_state_dimension(p, u.size(), "tc_pgf");
  if (!(t >= 0.0)) throw std::domain_error("tc_pgf: t must be >= 0");
  double prod = 1.0;
  for (int i = 0; i < p.q(); ++i) {
    if (!(std::fabs(u[i]) <= 1.0))
      throw std::domain_error("tc_pgf: need |u_i| <= 1");
    const auto& rates = p.gcp.components[i].rates;
    double di = 1.0, upow = 1.0;
    for (std::size_t j = 0; j < rates.size(); ++j) {
      upow *= u[i];
      di += rates[j] * (1.0 - upow) / p.sub.a[i];
    }
    prod *= di;
  }
  return std::pow((1.0 - p.sub.theta) / (prod - p.sub.theta),
                  p.sub.lambda * t);
}

inline double tc_mean(const TcModelParams& p, int i, double t) {
  p.validate();
  if (i < 0 || i >= p.q())
    throw std::invalid_argument("tc_mean: component out of range");
  if (!(t >= 0.0)) throw std::domain_error("tc_mean: t must be >= 0");
  return p.gcp.components[i].mean_rate() * p.sub.lambda * t /
         (p.sub.a[i] * (1.0 - p.sub.theta));
}

// Cov(N_i(t), N_l(t)): a same-component term from the conditional variance
// of the counting part plus the clock covariance carried by both mean rates.
inline double tc_cov(const TcModelParams& p, int i, int l, double t) {
  p.validate();
  if (i < 0 || i >= p.q() || l < 0 || l >= p.q())
    throw std::invalid_argument("tc_cov: component out of range");
  if (!(t >= 0.0)) throw std::domain_error("tc_cov: t must be >= 0");
  const double lt = p.sub.lambda * t;
  const double om = 1.0 - p.sub.theta;
  const double mi = p.gcp.components[i].mean_rate();
  const double ml = p.gcp.components[l].mean_rate();
  double cov = mi * ml * lt / (p.sub.a[i] * p.sub.a[l] * om * om) *
               (i == l ? 1.0 : p.sub.theta);
  if (i == l)
    cov += p.gcp.components[i].var_rate() * lt / (p.sub.a[i] * om);
  return cov;
}

namespace detail {

// c = -sum_j lambda_j (1 - e^{sign * w * j}), the conditional characteristic
// exponent of one counting component per unit of clock time.
inline Complex counting_exponent(const GcpParams& g, double sign) {
  Complex c{0.0, 0.0};
  for (std::size_t j = 0; j < g.rates.size(); ++j) {
    const double jump = static_cast<double>(j + 1);
    c -= g.rates[j] * (1.0 - std::exp(Complex{0.0, sign * jump}));
  }
  return c;
}

}  // namespace detail

// Codifference tau(i, l) = ln E e^{w(N_i - N_l)} - ln E e^{w N_i}
//                        - ln E e^{-w N_l}; principal logs before the
// lambda t scaling. For i = l the joint factor is identically 1.
inline Complex tc_codifference(const TcModelParams& p, int i, int l,
                               double t) {
  p.validate();
  if (i < 0 || i >= p.q() || l < 0 || l >= p.q())
    throw std::invalid_argument("tc_codifference: component out of range");
  if (!(t >= 0.0))
    throw std::domain_error("tc_codifference: t must be >= 0");
  const double lt = p.sub.lambda * t;
  const double om = 1.0 - p.sub.theta;
  const double ai = p.sub.a[i], al = p.sub.a[l];
  const Complex ci = detail::counting_exponent(p.gcp.components[i], 1.0);
  const Complex cl = detail::counting_exponent(p.gcp.components[l], -1.0);
  Complex tau{0.0, 0.0};
  if (i != l)
    tau += lt * std::log(Complex{ai * al * om, 0.0} /
                         ((ai - ci) * (al - cl) - p.sub.theta * ai * al));
  tau -= lt * std::log(Complex{ai * al * om * om, 0.0} /
                       ((ai * om - ci) * (al * om - cl)));
  return tau;
}

// Levy measure mass at state n (nonzero, componentwise >= 0). Two pieces:
// axis jumps inherited from the per-coordinate gamma parts (present only
// when exactly one component moves) and the k-series of simultaneous jumps
// driven by the shared shock, truncated with the usual tail certificate.
inline SeriesResult tc_levy_measure(const TcModelParams& p,
                                    std::span<const long long> n,
                                    const SeriesControl& ctl = {}) {
  p.validate();
  detail::check_state_dimension(p, n.size(), "tc_levy_measure");
  int moving = -1, count_moving = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < 0) return {0.0, 0, 0.0};
    if (n[i] > 0) {
      moving = static_cast<int>(i);
      ++count_moving;
    }
  }
  if (count_moving == 0)
    throw std::domain_error("tc_levy_measure: the origin carries no mass");
  std::vector<detail::ComponentTerms> comp;
  comp.reserve(n.size());
  double sum_log_rho = 0.0;
  for (int i = 0; i < p.q(); ++i) {
    comp.push_back(
        detail::component_terms(p.gcp.components[i], p.sub.a[i], n[i]));
    sum_log_rho += comp.back().log_rho;
  }
  double axis = 0.0;
  if (count_moving == 1) {
    // Gamma-part jump on the single moving coordinate: eta >= 1 throughout.
    KahanSum acc;
    const auto& ct = comp[moving];
    for (std::size_t c = 0; c < ct.eta.size(); ++c)
      acc.add(std::exp(log_gamma(static_cast<double>(ct.eta[c])) +
                       ct.logw[c]));
    axis = p.sub.lambda * acc.value();
  }
  const double log_lambda = std::log(p.sub.lambda);
  const double log_theta = std::log(p.sub.theta);
  const auto series = sum_series(
      [&](std::size_t h) {
        const double k = static_cast<double>(h) + 1.0;
        double log_abs =
            log_lambda + k * log_theta - std::log(k) + k * sum_log_rho;
        for (const auto& c : comp)
          log_abs += detail::log_inner_sum(c, k);
        return LogTerm{log_abs, 1};
      },
      ctl);
  return {axis + series.value, series.terms_used, series.tail_bound};
}

}  // namespace mgcp
