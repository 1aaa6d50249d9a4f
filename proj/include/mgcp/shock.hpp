#pragma once

// Shock-driven failure built on the time-changed counting process: the system
// dies once the total number of shocks reaches a random threshold S >= 1.
// Threshold laws (geometric, hypergeometric count of marked draws, explicit
// table), the failure-time survival function, the per-type conditional hazard
// of a size-l jump in one component, the failure sub-density attributing the
// crossing to a single-component jump, and the probability that a given
// component causes the failure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mgcp/quadrature.hpp"
#include "mgcp/timechanged.hpp"

namespace mgcp {

// P{S = k} = p (1-p)^{k-1} on k = 1, 2, ...
struct GeometricThreshold {
  double p = 0.5;
};

// S is the number of marked items among K draws without replacement from a
// population of N holding n marked, lifted to 1 when the raw count is 0 so
// the threshold always demands at least one shock.
struct HypergeometricThreshold {
  long long N = 0;
  long long K = 0;
  long long n = 0;
};

// finite table of (k, P{S = k}) rows, k >= 1 strictly increasing, summing to 1
struct ExplicitThreshold {
  std::vector<std::pair<long long, double>> pmf;
};

using ThresholdDistribution =
    std::variant<GeometricThreshold, HypergeometricThreshold,
                 ExplicitThreshold>;

inline void validate_threshold(const ThresholdDistribution& dist) {
  if (const auto* g = std::get_if<GeometricThreshold>(&dist)) {
    if (!(g->p > 0.0) || !(g->p <= 1.0))
      throw std::invalid_argument("geometric threshold: need p in (0, 1]");
    return;
  }
  if (const auto* h = std::get_if<HypergeometricThreshold>(&dist)) {
    if (h->N < 0)
      throw std::invalid_argument("hypergeometric threshold: need N >= 0");
    if (h->K < 0 || h->K > h->N)
      throw std::invalid_argument(
          "hypergeometric threshold: need 0 <= K <= N");
    if (h->n < 0 || h->n > h->N)
      throw std::invalid_argument(
          "hypergeometric threshold: need 0 <= n <= N");
    return;
  }
  const auto& e = std::get<ExplicitThreshold>(dist);
  if (e.pmf.empty())
    throw std::invalid_argument("explicit threshold: table is empty");
  double total = 0.0;
  long long prev = 0;
  for (const auto& [k, pr] : e.pmf) {
    if (k <= prev)
      throw std::invalid_argument(
          "explicit threshold: values must be >= 1 and strictly increasing");
    if (!(pr >= 0.0) || !(pr <= 1.0))
      throw std::invalid_argument(
          "explicit threshold: probabilities must lie in [0, 1]");
    prev = k;
    total += pr;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("explicit threshold: table must sum to 1");
}

// P{S > k}. The k = 0 value is pinned to 1 for every law: a system that has
// absorbed no shocks is alive by convention, which folds any raw threshold
// mass at zero into the value one.
inline double threshold_survival(const ThresholdDistribution& dist,
                                 long long k) {
  if (k < 0) throw std::domain_error("threshold_survival: need k >= 0");
  if (k == 0) return 1.0;
  if (const auto* g = std::get_if<GeometricThreshold>(&dist))
    return std::pow(1.0 - g->p, static_cast<double>(k));
  if (const auto* h = std::get_if<HypergeometricThreshold>(&dist)) {
    const long long N = h->N, K = h->K, n = h->n;
    // raw count ranges over max(0, K + n - N) .. min(K, n)
    if (k + 1 > n || K - k - 1 < 0) return 0.0;
    if (K - k - 1 > N - n) return 1.0;  // support starts above k
    const auto log_binom = [](long long top, long long bot) {
      return log_gamma(static_cast<double>(top) + 1.0) -
             log_gamma(static_cast<double>(bot) + 1.0) -
             log_gamma(static_cast<double>(top - bot) + 1.0);
    };
    const double prefactor =
        std::exp(log_binom(n, k + 1) + log_binom(N - n, K - k - 1) -
                 log_binom(N, K));
    const double series = hyp3f2_terminating(
        1.0, static_cast<double>(k + 1 - K), static_cast<double>(k + 1 - n),
        static_cast<double>(k + 2), static_cast<double>(N + k + 2 - K - n));
    return std::clamp(prefactor * series, 0.0, 1.0);
  }
  const auto& e = std::get<ExplicitThreshold>(dist);
  double tail = 0.0;
  for (const auto& [kv, pr] : e.pmf)
    if (kv > k) tail += pr;
  return tail;
}

// P{S = k} via survival differences, so the k = 0 convention carries over.
inline double threshold_pmf(const ThresholdDistribution& dist, long long k) {
  if (k <= 0) return 0.0;
  return std::max(0.0,
                  threshold_survival(dist, k - 1) - threshold_survival(dist, k));
}

struct ShockModel {
  TcModelParams model;
  ThresholdDistribution threshold;

  void validate() const {
    model.validate();
    validate_threshold(threshold);
  }
};

namespace detail {

// ln sum_c exp(lgamma(h + xi_c) + logw_c) over the jump configurations; every
// configuration of a positive jump size has xi_c >= 1, so the argument stays
// positive for h >= 0.
inline double log_jump_sum(const ComponentTerms& ct, double h) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double best = kNegInf, scaled = 0.0;
  for (std::size_t c = 0; c < ct.eta.size(); ++c) {
    const double le =
        log_gamma(h + static_cast<double>(ct.eta[c])) + ct.logw[c];
    if (le == kNegInf) continue;
    if (le > best) {
      scaled = scaled * std::exp(best - le) + 1.0;
      best = le;
    } else {
      scaled += std::exp(le - best);
    }
  }
  return best == kNegInf ? kNegInf : best + std::log(scaled);
}

// ln sum_c exp(lpoch(lt, h + eta_c) + logw_c): the inner sum of one component
// with its Pochhammer kept in shifted form instead of split into
// lpoch(lt, h) * lpoch(lt + h, eta).
inline double log_state_sum_shifted(const ComponentTerms& ct, double lt,
                                    long long h) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double best = kNegInf, scaled = 0.0;
  for (std::size_t c = 0; c < ct.eta.size(); ++c) {
    const double le = log_pochhammer(lt, h + ct.eta[c]) + ct.logw[c];
    if (le == kNegInf) continue;
    if (le > best) {
      scaled = scaled * std::exp(best - le) + 1.0;
      best = le;
    } else {
      scaled += std::exp(le - best);
    }
  }
  return best == kNegInf ? kNegInf : best + std::log(scaled);
}

// Series over the shared shift with component r carried in shifted-Pochhammer
// form. Its value equals the state probability; it is kept as a separate
// evaluation path because it is the factor the hazard numerator produces.
inline SeriesResult state_block_series(const TcModelParams& p,
                                       const std::vector<ComponentTerms>& comp,
                                       int r, double t,
                                       const SeriesControl& ctl) {
  const double lt = p.sub.lambda * t;
  const double log_theta = std::log(p.sub.theta);
  const double base = lt * std::log1p(-p.sub.theta);
  double sum_log_rho = 0.0;
  for (const auto& c : comp) sum_log_rho += c.log_rho;
  return sum_series(
      [&](std::size_t h) {
        const double hd = static_cast<double>(h);
        double log_abs = base + hd * log_theta - log_gamma(hd + 1.0) +
                         (hd + lt) * sum_log_rho +
                         log_state_sum_shifted(comp[r], lt,
                                               static_cast<long long>(h));
        for (std::size_t i = 0; i < comp.size(); ++i)
          if (static_cast<int>(i) != r)
            log_abs += log_inner_sum(comp[i], lt + hd);
        return LogTerm{log_abs, 1};
      },
      ctl);
}

// Series over the jump-side shift: sum_h (theta prod_i rho_i)^h / h! times
// the gamma-weighted jump configuration sum. Multiplied by lambda this is the
// Levy mass of the jump, reached through a different code path.
inline SeriesResult jump_block_series(double theta, const ComponentTerms& jump,
                                      double sum_log_rho,
                                      const SeriesControl& ctl) {
  const double log_ratio = std::log(theta) + sum_log_rho;
  return sum_series(
      [&](std::size_t h) {
        const double hd = static_cast<double>(h);
        return LogTerm{hd * log_ratio - log_gamma(hd + 1.0) +
                           log_jump_sum(jump, hd),
                       1};
      },
      ctl);
}

// visits every componentwise nonnegative state with the given total, last
// coordinate absorbing the remainder
template <typename Fn>
void for_each_state_with_total(int q, long long total, Fn&& fn) {
  std::vector<long long> st(static_cast<std::size_t>(q), 0);
  auto rec = [&](auto&& self, int pos, long long rest) -> void {
    if (pos == q - 1) {
      st[static_cast<std::size_t>(pos)] = rest;
      fn(const_cast<const std::vector<long long>&>(st));
      return;
    }
    for (long long v = 0; v <= rest; ++v) {
      st[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, rest - v);
    }
  };
  rec(rec, 0, total);
}

}  // namespace detail

// P{T > t}: the threshold tail paired with the distribution of the total
// count, sum_k P{S > k} P{total = k}. Totals are added in ascending order
// until the remainder certificate min(P{S > k+1}, remaining count mass)
// clears the tolerance.
inline SeriesResult failure_survival(const ShockModel& sm, double t,
                                     const SeriesControl& ctl = {}) {
  sm.validate();
  if (!(t >= 0.0)) throw std::domain_error("failure_survival: t must be >= 0");
  if (t == 0.0) return {1.0, 0, 0.0};
  const int q = sm.model.q();
  KahanSum acc, count;
  double pmf_tails = 0.0;
  for (long long k = 0; k < static_cast<long long>(ctl.max_terms); ++k) {
    const double fs = threshold_survival(sm.threshold, k);
    if (fs == 0.0)
      return {acc.value(), static_cast<std::size_t>(k), pmf_tails};
    double qk = 0.0;
    detail::for_each_state_with_total(
        q, k, [&](const std::vector<long long>& st) {
          const auto r = tc_pmf(sm.model, st, t, ctl);
          qk += r.value;
          pmf_tails += r.tail_bound;
        });
    count.add(qk);
    acc.add(fs * qk);
    const double count_tail =
        std::max(0.0, 1.0 - count.value()) + pmf_tails;
    const double remainder =
        std::min(threshold_survival(sm.threshold, k + 1), count_tail);
    if (remainder <= std::max(ctl.abs_tol, ctl.rel_tol * acc.value()))
      return {acc.value(), static_cast<std::size_t>(k + 1),
              remainder + pmf_tails};
  }
  throw SeriesNonConvergence(
      "failure_survival: no convergence within max_terms = " +
          std::to_string(ctl.max_terms),
      acc.value(), ctl.max_terms);
}

// Numerator of the conditional jump rate: the joint density of {state n at t}
// and {a size-l jump of component r immediately after}. It factorizes into
// lambda times the jump-side series times the state block, and the product
// form is evaluated directly.
inline SeriesResult hazard_numerator(const TcModelParams& p,
                                     std::span<const long long> n, int r,
                                     long long lr, double t,
                                     const SeriesControl& ctl = {}) {
  p.validate();
  detail::check_state_dimension(p, n.size(), "hazard_numerator");
  if (r < 0 || r >= p.q())
    throw std::invalid_argument("hazard_numerator: component out of range");
  if (lr < 1 || lr > p.gcp.components[r].k())
    throw std::domain_error(
        "hazard_numerator: jump size must lie in 1..k of the component");
  if (!(t > 0.0)) throw std::domain_error("hazard_numerator: t must be > 0");
  for (long long ni : n)
    if (ni < 0) return {0.0, 0, 0.0};
  std::vector<detail::ComponentTerms> comp;
  comp.reserve(n.size());
  double sum_log_rho = 0.0;
  for (int i = 0; i < p.q(); ++i) {
    comp.push_back(
        detail::component_terms(p.gcp.components[i], p.sub.a[i], n[i]));
    sum_log_rho += comp.back().log_rho;
  }
  const auto jump =
      detail::component_terms(p.gcp.components[r], p.sub.a[r], lr);
  const auto s1 = detail::jump_block_series(p.sub.theta, jump, sum_log_rho, ctl);
  const auto s2 = detail::state_block_series(p, comp, r, t, ctl);
  const double lam = p.sub.lambda;
  return {lam * s1.value * s2.value, s1.terms_used + s2.terms_used,
          lam * (s1.tail_bound * s2.value + s2.tail_bound * s1.value +
                 s1.tail_bound * s2.tail_bound)};
}

// Conditional rate of a size-l jump in component r given state n at time t
// and survival so far. Survival given the state is a property of the
// threshold alone, so it cancels and the rate is the numerator divided by the
// state probability.
inline SeriesResult hazard_rate(const ShockModel& sm,
                                std::span<const long long> n, int r,
                                long long lr, double t,
                                const SeriesControl& ctl = {}) {
  sm.validate();
  for (long long ni : n)
    if (ni < 0)
      throw std::domain_error(
          "hazard_rate: conditioning state must be componentwise >= 0");
  const auto num = hazard_numerator(sm.model, n, r, lr, t, ctl);
  const auto den = tc_pmf(sm.model, n, t, ctl);
  if (!(den.value > 1e-300))
    throw std::domain_error(
        "hazard_rate: conditioning state probability underflows");
  const double value = num.value / den.value;
  return {value, num.terms_used + den.terms_used,
          (num.tail_bound + value * den.tail_bound) / den.value};
}

// Sub-density of failure at time t caused by a size-l jump of component r
// that lifts the total over the threshold:
//   f_r(t) = lambda sum_m P{state total = m at t} sum_{l <= k_r}
//            S1_r(l) P{m < S <= m + l},
// grouped by state total m so the bounded-threshold and count-mass stopping
// rules both apply.
inline SeriesResult failure_subdensity(const ShockModel& sm, int r, double t,
                                       const SeriesControl& ctl = {}) {
  sm.validate();
  const auto& p = sm.model;
  if (r < 0 || r >= p.q())
    throw std::invalid_argument("failure_subdensity: component out of range");
  if (!(t > 0.0))
    throw std::domain_error("failure_subdensity: t must be > 0");
  const int q = p.q();
  const int kr = p.gcp.components[r].k();
  double sum_log_rho = 0.0;
  for (int i = 0; i < q; ++i)
    sum_log_rho +=
        detail::component_terms(p.gcp.components[i], p.sub.a[i], 0).log_rho;
  // jump-side factors, one per jump size, shared by every state
  std::vector<double> jump_rate(static_cast<std::size_t>(kr) + 1, 0.0);
  double jump_total = 0.0, jump_tails = 0.0;
  for (long long l = 1; l <= kr; ++l) {
    const auto jump =
        detail::component_terms(p.gcp.components[r], p.sub.a[r], l);
    const auto s1 =
        detail::jump_block_series(p.sub.theta, jump, sum_log_rho, ctl);
    jump_rate[static_cast<std::size_t>(l)] = p.sub.lambda * s1.value;
    jump_total += jump_rate[static_cast<std::size_t>(l)];
    jump_tails += p.sub.lambda * s1.tail_bound;
  }
  KahanSum f, count;
  double tails = 0.0;
  for (long long m = 0; m < static_cast<long long>(ctl.max_terms); ++m) {
    const double fs = threshold_survival(sm.threshold, m);
    if (fs == 0.0) return {f.value(), static_cast<std::size_t>(m), tails};
    double wsum = 0.0;
    for (long long l = 1; l <= kr; ++l)
      wsum += jump_rate[static_cast<std::size_t>(l)] *
              std::max(0.0, fs - threshold_survival(sm.threshold, m + l));
    detail::for_each_state_with_total(
        q, m, [&](const std::vector<long long>& st) {
          std::vector<detail::ComponentTerms> comp;
          comp.reserve(st.size());
          for (int i = 0; i < q; ++i)
            comp.push_back(detail::component_terms(p.gcp.components[i],
                                                   p.sub.a[i], st[i]));
          const auto s2 = detail::state_block_series(p, comp, r, t, ctl);
          count.add(s2.value);
          f.add(s2.value * wsum);
          tails += s2.tail_bound * jump_total + s2.value * jump_tails;
        });
    const double count_tail = std::max(0.0, 1.0 - count.value());
    const double remainder =
        jump_total * std::min(threshold_survival(sm.threshold, m + 1),
                              count_tail);
    if (remainder <= std::max(ctl.abs_tol, ctl.rel_tol * std::fabs(f.value())))
      return {f.value(), static_cast<std::size_t>(m + 1), remainder + tails};
  }
  throw SeriesNonConvergence(
      "failure_subdensity: no convergence within max_terms = " +
          std::to_string(ctl.max_terms),
      f.value(), ctl.max_terms);
}

// P{failure is caused by component r}: the sub-density integrated over all
// time. The horizon doubles until the survival mass beyond it is negligible,
// then adaptive quadrature integrates from near zero.
inline QuadratureResult cause_probability(const ShockModel& sm, int r,
                                          const QuadratureControl& qctl = {},
                                          const SeriesControl& ctl = {}) {
  sm.validate();
  if (r < 0 || r >= sm.model.q())
    throw std::invalid_argument("cause_probability: component out of range");
  double t_max = 1.0;
  int doublings = 0;
  while (failure_survival(sm, t_max, ctl).value >= 1e-8) {
    t_max *= 2.0;
    if (++doublings > 60)
      throw SeriesNonConvergence(
          "cause_probability: survival does not decay within a finite horizon",
          0.0, static_cast<std::size_t>(doublings));
  }
  // the sub-density stays bounded near 0, so the trimmed sliver is O(1e-9)
  return adaptive_simpson(
      [&](double u) { return failure_subdensity(sm, r, u, ctl).value; }, 1e-9,
      t_max, qctl);
}

// survival values over an ascending time grid, (t, P{T > t}) per row
inline std::vector<std::pair<double, double>> survival_curve(
    const ShockModel& sm, std::span<const double> grid,
    const SeriesControl& ctl = {}) {
  sm.validate();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0))
      throw std::domain_error("survival_curve: grid times must be >= 0");
    if (i > 0 && grid[i] < grid[i - 1])
      throw std::invalid_argument("survival_curve: grid must be ascending");
  }
  std::vector<std::pair<double, double>> rows;
  rows.reserve(grid.size());
  for (double t : grid)
    rows.emplace_back(t, failure_survival(sm, t, ctl).value);
  return rows;
}

}  // namespace mgcp
