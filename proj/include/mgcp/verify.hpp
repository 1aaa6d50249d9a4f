#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mgcp/config.hpp"
#include "mgcp/gcp.hpp"
#include "mgcp/montecarlo.hpp"
#include "mgcp/quadrature.hpp"
#include "mgcp/shock.hpp"
#include "mgcp/special.hpp"
#include "mgcp/subordinator.hpp"
#include "mgcp/timechanged.hpp"

namespace mgcp {

// One line of a verification report. The check passes iff the observed
// statistic (a relative deviation, a z-score, a mass deficiency) stays
// within its tolerance. A NaN observed value always fails.
struct CheckResult {
  std::string suite;
  std::string name;
  double observed = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

inline bool all_passed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace detail {

inline std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline void push_check(std::vector<CheckResult>& out, std::string suite,
                       std::string name, double observed, double tol,
                       std::string note = {}) {
  const bool ok = observed == observed && std::abs(observed) <= tol;
  out.push_back({std::move(suite), std::move(name), observed, tol, ok,
                 std::move(note)});
}

// Runs one check body; an exception becomes a failed line instead of
// aborting the whole report, so odd-but-valid configs still get a verdict
// on every other check.
template <class Fn>
inline void guarded(std::vector<CheckResult>& out, const char* suite,
                    const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    out.push_back({suite, name, std::numeric_limits<double>::quiet_NaN(), 0.0,
                   false, std::string("exception: ") + e.what()});
  }
}

// P{state = 0} in closed form, the geometric-ratio expression the h-series
// must collapse to at the origin.
inline double origin_closed_form(const TcModelParams& p, double t) {
  double prod_rho = 1.0;
  for (int i = 0; i < p.q(); ++i)
    prod_rho *= p.sub.a[i] / (p.sub.a[i] + p.gcp.components[i].total_rate());
  const double th = p.sub.theta;
  return std::pow((1.0 - th) * prod_rho / (1.0 - th * prod_rho),
                  p.sub.lambda * t);
}

// Probe vector u with entries in (0, 1), spread across components.
inline std::vector<double> probe_u(int q) {
  std::vector<double> u(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i)
    u[static_cast<std::size_t>(i)] =
        q == 1 ? 0.3 : 0.3 + 0.4 * static_cast<double>(i) / (q - 1);
  return u;
}

inline double rel_dev(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// z-score of an MC estimate against its analytic target; standard error
// zero demands exact agreement.
inline double z_score(double analytic, const McEstimate& e) {
  const double d = std::abs(analytic - e.value);
  if (e.std_err == 0.0)
    return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return d / e.std_err;
}

inline std::string mc_note(double analytic, const McEstimate& e) {
  return "analytic " + fmt(analytic) + ", mc " + fmt(e.value) + " se " +
         fmt(e.std_err) + ", n " + fmt(static_cast<double>(e.n));
}

// Codifference estimate from three characteristic-function passes sharing
// one RNG stream (same seed, so identical draws couple the three means).
// The standard error adds the per-mean relative errors linearly, which is
// conservative under the shared-draw correlation.
struct CodiffEstimate {
  Complex value{0.0, 0.0};
  double std_err = 0.0;
};

template <class DrawPair>
inline CodiffEstimate estimate_codifference(DrawPair&& draw,
                                            const McConfig& cfg) {
  auto cf = [&](double wi, double wl) {
    return estimate_complex(
        [&](Rng& rng) {
          const auto [xi, xl] = draw(rng);
          return std::exp(Complex{0.0, wi * xi + wl * xl});
        },
        cfg);
  };
  const auto m1 = cf(1.0, -1.0);
  const auto m2 = cf(1.0, 0.0);
  const auto m3 = cf(0.0, -1.0);
  CodiffEstimate out;
  out.value = std::log(m1.value) - std::log(m2.value) - std::log(m3.value);
  for (const auto& m : {m1, m2, m3})
    out.std_err += std::hypot(m.std_err_re, m.std_err_im) / std::abs(m.value);
  return out;
}

}  // namespace detail

// Deterministic closed-form cross-identities evaluated at the configured
// model: origin mass, normalization, transform-vs-moment consistency, the
// jump-measure exponent identity, and the degenerate-case reductions.
inline std::vector<CheckResult> verify_analytic(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const TcModelParams& p = cfg.model;
  const SubordinatorParams& sp = p.sub;
  const int q = p.q();
  const SeriesControl sctl = cfg.series;

  detail::guarded(out, "analytic", "origin pmf closed form", [&] {
    const std::vector<long long> zero(static_cast<std::size_t>(q), 0);
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
      const double got = tc_pmf(p, zero, t, sctl).value;
      worst = std::max(worst, detail::rel_dev(got, detail::origin_closed_form(p, t)));
    }
    detail::push_check(out, "analytic", "origin pmf closed form", worst, 1e-12,
                       "series origin mass vs geometric-ratio form, t in {0.5, 1, 2}");
  });

  detail::guarded(out, "analytic", "origin pmf vs pgf", [&] {
    const std::vector<long long> zero(static_cast<std::size_t>(q), 0);
    const std::vector<double> u0(static_cast<std::size_t>(q), 0.0);
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0})
      worst = std::max(worst, detail::rel_dev(tc_pmf(p, zero, t, sctl).value,
                                              tc_pgf(p, u0, t)));
    detail::push_check(out, "analytic", "origin pmf vs pgf", worst, 1e-12,
                       "pgf at u = 0 equals the zero-state mass");
  });

  detail::guarded(out, "analytic", "pmf normalization", [&] {
    const double t = 1.0;
    double acc = 0.0, tails = 0.0;
    long long total = 0;
    int quiet = 0;
    for (; total <= 256; ++total) {
      double shell = 0.0;
      detail::for_each_state_with_total(
          q, total, [&](std::span<const long long> n) {
            const auto r = tc_pmf(p, n, t, sctl);
            shell += r.value;
            tails += r.tail_bound;
          });
      acc += shell;
      if (1.0 - acc - tails < 1e-9) break;
      quiet = shell < 1e-15 ? quiet + 1 : 0;
      if (quiet >= 3) break;
    }
    const double deficiency = std::max(0.0, 1.0 - acc - tails);
    detail::push_check(out, "analytic", "pmf normalization", deficiency, 1e-6,
                       "mass deficiency over the box total <= " +
                           detail::fmt(static_cast<double>(total)) + " at t 1");
  });

  detail::guarded(out, "analytic", "transform slope vs mean", [&] {
    // The transform's domain is s >= 0, so the derivative at the origin is
    // taken with second-order one-sided stencils.
    const double t = 1.0;
    double worst = 0.0;
    for (int i = 0; i < q; ++i) {
      const double mean = sub_mean(sp, i, t);
      const double h = 1e-4 / std::max(1.0, mean);
      std::vector<double> s(static_cast<std::size_t>(q), 0.0);
      auto lst_at = [&](double si) {
        s[static_cast<std::size_t>(i)] = si;
        return sub_lst(sp, s, t);
      };
      const double slope =
          (-3.0 * lst_at(0.0) + 4.0 * lst_at(h) - lst_at(2.0 * h)) / (2.0 * h);
      worst = std::max(worst, detail::rel_dev(-slope, mean));
    }
    detail::push_check(out, "analytic", "transform slope vs mean", worst, 1e-6,
                       "one-sided second-order difference at s = 0");
  });

  detail::guarded(out, "analytic", "transform curvature vs covariance", [&] {
    const double t = 1.0;
    const int i = 0, j = q - 1;
    const double mi = sub_mean(sp, i, t), mj = sub_mean(sp, j, t);
    const double hi = 1e-4 / std::max(1.0, mi), hj = 1e-4 / std::max(1.0, mj);
    const double want = sub_cov(sp, i, j, t) + mi * mj;
    std::vector<double> s(static_cast<std::size_t>(q), 0.0);
    auto lst_at = [&](double si, double sj) {
      s.assign(static_cast<std::size_t>(q), 0.0);
      s[static_cast<std::size_t>(i)] += si;
      s[static_cast<std::size_t>(j)] += sj;
      return sub_lst(sp, s, t);
    };
    double got;
    if (i == j) {
      // E G^2 from the one-sided second-order second-derivative stencil.
      got = (2.0 * lst_at(0.0, 0.0) - 5.0 * lst_at(hi, 0.0) +
             4.0 * lst_at(2.0 * hi, 0.0) - lst_at(3.0 * hi, 0.0)) /
            (hi * hi);
    } else {
      // Product of one-sided first-derivative stencils, O(h^2) accurate.
      const double c[3] = {-3.0, 4.0, -1.0};
      double acc = 0.0;
      for (int m = 0; m < 3; ++m)
        for (int nn = 0; nn < 3; ++nn)
          acc += c[m] * c[nn] * lst_at(m * hi, nn * hj);
      got = acc / (4.0 * hi * hj);
    }
    detail::push_check(out, "analytic", "transform curvature vs covariance",
                       detail::rel_dev(got, want), 1e-4,
                       "one-sided mixed second difference vs cov + mean product");
  });

  detail::guarded(out, "analytic", "pgf slope vs mean", [&] {
    const double t = 1.0;
    double worst = 0.0;
    for (int i = 0; i < q; ++i) {
      const double mean = tc_mean(p, i, t);
      const double h = 1e-5 / std::max(1.0, mean);
      std::vector<double> u(static_cast<std::size_t>(q), 1.0);
      u[static_cast<std::size_t>(i)] = 1.0 - h;
      const double dn = tc_pgf(p, u, t);
      u[static_cast<std::size_t>(i)] = 1.0;
      const double at1 = tc_pgf(p, u, t);
      // One-sided difference keeps u inside [-1, 1]; first-order error is
      // O(h E M^2), absorbed by the tolerance.
      worst = std::max(worst, detail::rel_dev((at1 - dn) / h, mean));
    }
    detail::push_check(out, "analytic", "pgf slope vs mean", worst, 1e-3,
                       "one-sided pgf difference at u = 1 vs closed mean");
  });

  detail::guarded(out, "analytic", "jump measure exponent identity", [&] {
    const std::vector<double> u = detail::probe_u(q);
    double prod = 1.0;
    for (int i = 0; i < q; ++i) {
      const auto& rates = p.gcp.components[i].rates;
      double di = 1.0, upow = 1.0;
      for (std::size_t j = 0; j < rates.size(); ++j) {
        upow *= u[static_cast<std::size_t>(i)];
        di += rates[j] * (1.0 - upow) / sp.a[static_cast<std::size_t>(i)];
      }
      prod *= di;
    }
    const double want = sp.lambda * std::log((1.0 - sp.theta) / (prod - sp.theta));
    double acc = 0.0;
    int quiet = 0;
    long long total = 1;
    for (; total <= 96; ++total) {
      double shell = 0.0;
      detail::for_each_state_with_total(
          q, total, [&](std::span<const long long> n) {
            double upow = 1.0;
            for (int i = 0; i < q; ++i)
              upow *= std::pow(u[static_cast<std::size_t>(i)],
                               static_cast<double>(n[static_cast<std::size_t>(i)]));
            shell += (upow - 1.0) * tc_levy_measure(p, n, sctl).value;
          });
      acc += shell;
      quiet = std::abs(shell) < 1e-13 * std::max(1.0, std::abs(acc)) ? quiet + 1 : 0;
      if (quiet >= 3) break;
    }
    detail::push_check(out, "analytic", "jump measure exponent identity",
                       std::abs(acc - want), 1e-6,
                       "sum (u^n - 1) nu(n) vs log pgf exponent, shells to " +
                           detail::fmt(static_cast<double>(total)));
  });

  detail::guarded(out, "analytic", "one-component clock reduction", [&] {
    SubordinatorParams one{sp.lambda, sp.theta, {sp.a[0]}};
    const double t = 1.7;
    double worst = 0.0;
    for (double s : {0.25, 1.0, 2.5}) {
      const std::vector<double> sv{s};
      const double want =
          std::pow(1.0 + s / ((1.0 - sp.theta) * sp.a[0]), -sp.lambda * t);
      worst = std::max(worst, detail::rel_dev(sub_lst(one, sv, t), want));
    }
    detail::push_check(out, "analytic", "one-component clock reduction", worst,
                       1e-12, "q = 1 transform vs scaled-gamma closed form");
  });

  detail::guarded(out, "analytic", "single-jump-size counting reduction", [&] {
    GcpParams g1{{p.gcp.components[0].rates[0]}};
    const double t = 0.9, mu = g1.rates[0] * t;
    double worst = 0.0;
    for (long long n = 0; n <= 20; ++n) {
      const double want =
          std::exp(static_cast<double>(n) * std::log(mu) - mu -
                   std::lgamma(static_cast<double>(n) + 1.0));
      worst = std::max(worst, detail::rel_dev(gcp_pmf(g1, n, t), want));
    }
    detail::push_check(out, "analytic", "single-jump-size counting reduction",
                       worst, 1e-12, "k = 1 pmf vs Poisson, n <= 20");
  });

  detail::guarded(out, "analytic", "independent-clock factorization", [&] {
    const double t = 1.3;
    double worst = 0.0;
    std::vector<long long> n(static_cast<std::size_t>(q), 1);
    auto check_state = [&] {
      double prod = 1.0;
      for (int i = 0; i < q; ++i)
        prod *= mz_pmf_component(p, i, n[static_cast<std::size_t>(i)], t);
      worst = std::max(worst, detail::rel_dev(mz_pmf(p, n, t), prod));
    };
    check_state();
    n[0] = 2;
    check_state();
    n[static_cast<std::size_t>(q - 1)] = 3;
    check_state();
    detail::push_check(out, "analytic", "independent-clock factorization",
                       worst, 1e-12, "joint pmf equals product of marginals");
  });

  detail::guarded(out, "analytic", "independent-clock marginal vs quadrature", [&] {
    // Marginal of one component driven by its own plain gamma clock equals
    // the gamma mixture of the conditional counting pmf.
    const double t = 1.1;
    const double lt = sp.lambda * t;
    double worst = 0.0;
    for (long long n : {0LL, 1LL, 3LL}) {
      const double a0 = sp.a[0];
      const auto& g = p.gcp.components[0];
      QuadratureControl qc;
      qc.abs_tol = 1e-12;
      // Integrand decays like x^{lt-1} e^{-a x}; cut where the gamma weight
      // is negligible.
      const double upper = (lt + 40.0) / a0 + 40.0;
      const auto r = adaptive_simpson(
          [&](double x) {
            if (x <= 0.0) return 0.0;
            const double logw = lt * std::log(a0) + (lt - 1.0) * std::log(x) -
                                a0 * x - std::lgamma(lt);
            return gcp_pmf(g, n, x) * std::exp(logw);
          },
          1e-12, upper, qc);
      worst = std::max(worst, detail::rel_dev(mz_pmf_component(p, 0, n, t), r.value));
    }
    detail::push_check(out, "analytic", "independent-clock marginal vs quadrature",
                       worst, 1e-8, "gamma-mixture integral, n in {0, 1, 3}");
  });

  return out;
}

// Monte Carlo master suite: every analytic evaluator against its sampler,
// |analytic - estimate| within 3 standard errors. Per-check seeds are
// derived deterministically from the configured seed.
inline std::vector<CheckResult> verify_mc(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const TcModelParams& p = cfg.model;
  const SubordinatorParams& sp = p.sub;
  const int q = p.q();
  const double t = 1.0;
  int stream = 0;
  auto next_cfg = [&] {
    McConfig c = cfg.mc;
    c.seed = cfg.mc.seed + 7919ull * static_cast<unsigned long long>(++stream);
    return c;
  };

  detail::guarded(out, "mc", "counting pmf", [&] {
    const auto& g = p.gcp.components[0];
    const double want = gcp_pmf(g, 1, t);
    const auto est = estimate(
        [&](Rng& rng) { return sample_gcp(g, t, rng) == 1 ? 1.0 : 0.0; },
        next_cfg());
    detail::push_check(out, "mc", "counting pmf", detail::z_score(want, est),
                       3.0, detail::mc_note(want, est));
  });

  detail::guarded(out, "mc", "clock transform", [&] {
    std::vector<double> s(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i)
      s[static_cast<std::size_t>(i)] = 0.5 + 0.25 * i;
    const double want = sub_lst(sp, s, t);
    const auto est = estimate(
        [&](Rng& rng) {
          const auto g = sample_subordinator(sp, t, rng);
          double dot = 0.0;
          for (int i = 0; i < q; ++i)
            dot += s[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
          return std::exp(-dot);
        },
        next_cfg());
    detail::push_check(out, "mc", "clock transform", detail::z_score(want, est),
                       3.0, detail::mc_note(want, est));
  });

  detail::guarded(out, "mc", "clock mean", [&] {
    const double want = sub_mean(sp, 0, t);
    const auto est = estimate(
        [&](Rng& rng) { return sample_subordinator(sp, t, rng)[0]; },
        next_cfg());
    detail::push_check(out, "mc", "clock mean", detail::z_score(want, est), 3.0,
                       detail::mc_note(want, est));
  });

  detail::guarded(out, "mc", "clock covariance", [&] {
    const int j = q - 1;
    const double mi = sub_mean(sp, 0, t), mj = sub_mean(sp, j, t);
    const double want = sub_cov(sp, 0, j, t);
    const auto est = estimate(
        [&](Rng& rng) {
          const auto g = sample_subordinator(sp, t, rng);
          return (g[0] - mi) * (g[static_cast<std::size_t>(j)] - mj);
        },
        next_cfg());
    detail::push_check(out, "mc", "clock covariance", detail::z_score(want, est),
                       3.0, detail::mc_note(want, est));
  });

  detail::guarded(out, "mc", "clock codifference", [&] {
    const int j = q - 1;
    const Complex want = sub_codifference(sp, 0, j, t);
    const auto est = detail::estimate_codifference(
        [&](Rng& rng) {
          const auto g = sample_subordinator(sp, t, rng);
          return std::pair<double, double>{g[0], g[static_cast<std::size_t>(j)]};
        },
        next_cfg());
    const double z = est.std_err == 0.0
                         ? (std::abs(est.value - want) == 0.0 ? 0.0
                            : std::numeric_limits<double>::infinity())
                         : std::abs(est.value - want) / est.std_err;
    detail::push_check(out, "mc", "clock codifference", z, 3.0,
                       "analytic " + detail::fmt(want.real()) + "+" +
                           detail::fmt(want.imag()) + "i, mc " +
                           detail::fmt(est.value.real()) + "+" +
                           detail::fmt(est.value.imag()) + "i se " +
                           detail::fmt(est.std_err));
  });

  detail::guarded(out, "mc", "state pmf", [&] {
    const std::vector<long long> n(static_cast<std::size_t>(q), 1);
    const double want = tc_pmf(p, n, t, cfg.series).value;
    const auto est = estimate(
        [&](Rng& rng) {
          const auto m = sample_tc(p, t, rng);
          for (int i = 0; i < q; ++i)
            if (m[static_cast<std::size_t>(i)] != 1) return 0.0;
          return 1.0;
        },
        next_cfg());
    detail::push_check(out, "mc", "state pmf", detail::z_score(want, est), 3.0,
                       detail::mc_note(want, est));
  });

  detail::guarded(out, "mc", "state pgf", [&] {
    const std::vector<double> u = detail::probe_u(q);
    const double want = tc_pgf(p, u, t);
    const auto est = estimate(
        [&](Rng& rng) {
          const auto m = sample_tc(p, t, rng);
          double prod = 1.0;
          for (int i = 0; i < q; ++i)
            prod *= std::pow(u[static_cast<std::size_t>(i)],
                             static_cast<double>(m[static_cast<std::size_t>(i)]));
          return prod;
        },
        next_cfg());
    detail::push_check(out, "mc", "state pgf", detail::z_score(want, est), 3.0,
                       detail::mc_note(want, est));
  });

  detail::guarded(out, "mc", "state covariance", [&] {
    const int j = q - 1;
    const double mi = tc_mean(p, 0, t), mj = tc_mean(p, j, t);
    const double want = tc_cov(p, 0, j, t);
    const auto est = estimate(
        [&](Rng& rng) {
          const auto m = sample_tc(p, t, rng);
          return (static_cast<double>(m[0]) - mi) *
                 (static_cast<double>(m[static_cast<std::size_t>(j)]) - mj);
        },
        next_cfg());
    detail::push_check(out, "mc", "state covariance", detail::z_score(want, est),
                       3.0, detail::mc_note(want, est));
  });

  detail::guarded(out, "mc", "state codifference", [&] {
    const int j = q - 1;
    const Complex want = tc_codifference(p, 0, j, t);
    const auto est = detail::estimate_codifference(
        [&](Rng& rng) {
          const auto m = sample_tc(p, t, rng);
          return std::pair<double, double>{
              static_cast<double>(m[0]),
              static_cast<double>(m[static_cast<std::size_t>(j)])};
        },
        next_cfg());
    const double z = est.std_err == 0.0
                         ? (std::abs(est.value - want) == 0.0 ? 0.0
                            : std::numeric_limits<double>::infinity())
                         : std::abs(est.value - want) / est.std_err;
    detail::push_check(out, "mc", "state codifference", z, 3.0,
                       "analytic " + detail::fmt(want.real()) + "+" +
                           detail::fmt(want.imag()) + "i, mc " +
                           detail::fmt(est.value.real()) + "+" +
                           detail::fmt(est.value.imag()) + "i se " +
                           detail::fmt(est.std_err));
  });

  detail::guarded(out, "mc", "failure survival", [&] {
    const ShockModel sm{p, cfg.threshold};
    sm.validate();
    const double want = failure_survival(sm, t, cfg.series).value;
    // Rao-Blackwellized draw: average the threshold survival over the
    // sampled state instead of also sampling the thresholds.
    const auto est = estimate(
        [&](Rng& rng) {
          const auto m = sample_tc(p, t, rng);
          double prod = 1.0;
          for (int i = 0; i < q; ++i)
            prod *= threshold_survival(sm.threshold,
                                       m[static_cast<std::size_t>(i)]);
          return prod;
        },
        next_cfg());
    detail::push_check(out, "mc", "failure survival", detail::z_score(want, est),
                       3.0, detail::mc_note(want, est));
  });

  return out;
}

// Governing-equation suite: the backward-difference equation residual for
// one to three equal-scale components, and the geometric decay of the
// truncated-generator residual at the configured clock parameters.
inline std::vector<CheckResult> verify_pde(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const SubordinatorParams& sp = cfg.model.sub;

  for (int q = 1; q <= 3; ++q) {
    const std::string name = "backward equation residual q=" + std::to_string(q);
    detail::guarded(out, "pde", name.c_str(), [&] {
      SubordinatorParams pq{sp.lambda, sp.theta,
                            std::vector<double>(static_cast<std::size_t>(q), sp.a[0])};
      double worst = 0.0;
      for (double scale : {0.2, 0.9, 2.5}) {
        for (double tmul : {1.25, 2.0, 3.0}) {
          const double t = tmul / pq.lambda;
          std::vector<double> al(static_cast<std::size_t>(q));
          for (int i = 0; i < q; ++i)
            al[static_cast<std::size_t>(i)] =
                scale * (i % 2 == 0 ? 1.0 : -0.6) * (1.0 + 0.3 * i);
          const Complex phi = sub_fourier(pq, al, t);
          const double rel =
              std::abs(de1_residual(pq, al, t)) / (std::abs(phi) + 1e-300);
          worst = std::max(worst, rel);
        }
      }
      detail::push_check(out, "pde", name, worst, 1e-10,
                         "3x3 grid of frequency scale and time");
    });
  }

  detail::guarded(out, "pde", "truncated generator decay", [&] {
    SubordinatorParams p2{sp.lambda, sp.theta, {sp.a[0], sp.a[0]}};
    const double a0 = sp.a[0];
    const std::vector<std::vector<double>> points{
        {0.25 * a0, -0.15 * a0},
        {0.10 * a0, 0.30 * a0},
        {-0.20 * a0, 0.20 * a0},
        {0.35 * a0, 0.05 * a0},
        {0.05 * a0, -0.30 * a0}};
    double worst = 0.0;
    for (const auto& al : points) {
      const double rate = std::abs(fourier_psi(p2, al) - Complex{1.0, 0.0});
      std::vector<double> mags;
      for (int order = 2; order <= 9; ++order)
        mags.push_back(std::abs(de2_residual(p2, al, 1.5, order)));
      for (std::size_t i = 1; i + 1 < mags.size(); ++i) {
        if (mags[i] <= 0.0 || mags[i + 1] <= 0.0) continue;
        const double ratio = mags[i + 1] / mags[i];
        worst = std::max(worst, std::abs(ratio - rate) / rate);
      }
    }
    detail::push_check(out, "pde", "truncated generator decay", worst, 0.6,
                       "successive residual ratios vs |psi - 1| at 5 points");
  });

  return out;
}

// Failure-machinery suite. The first checks are identities the
// implementation satisfies to near machine precision; the last two compare
// the per-cause calculus against the survival function's actual slope and
// report the accounting gap: a cause is credited only when a single
// component jumps and that jump alone clears the remaining threshold, so
// simultaneous jumps and overshoot mass carry no cause label and the
// credited total falls short of the full failure rate.
inline std::vector<CheckResult> verify_shock(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const ShockModel sm{cfg.model, cfg.threshold};
  const TcModelParams& p = cfg.model;
  const int q = p.q();
  const SeriesControl sctl = cfg.series;

  detail::guarded(out, "shock", "hazard flat across states", [&] {
    double worst = 0.0;
    std::vector<std::vector<long long>> states;
    states.emplace_back(static_cast<std::size_t>(q), 0);
    {
      std::vector<long long> s(static_cast<std::size_t>(q));
      for (int i = 0; i < q; ++i)
        s[static_cast<std::size_t>(i)] = 1 + (i % 2);
      states.push_back(s);
      for (int i = 0; i < q; ++i)
        s[static_cast<std::size_t>(i)] = i == 0 ? 3 : (i == q - 1 ? 1 : 0);
      states.push_back(s);
    }
    for (int r = 0; r < q; ++r) {
      const long long kr = static_cast<long long>(p.gcp.components[r].k());
      for (long long lr : {1LL, kr}) {
        std::vector<long long> axis(static_cast<std::size_t>(q), 0);
        axis[static_cast<std::size_t>(r)] = lr;
        const double want = tc_levy_measure(p, axis, sctl).value;
        for (const auto& n : states)
          for (double t : {0.5, 2.0})
            worst = std::max(
                worst,
                detail::rel_dev(hazard_rate(sm, n, r, lr, t, sctl).value, want));
        if (kr == 1) break;
      }
    }
    detail::push_check(out, "shock", "hazard flat across states", worst, 1e-8,
                       "conditional jump rate equals the jump measure at the "
                       "axis state, all probed states and times");
  });

  if (std::holds_alternative<GeometricThreshold>(sm.threshold)) {
    detail::guarded(out, "shock", "survival closed form", [&] {
      const double gp = std::get<GeometricThreshold>(sm.threshold).p;
      const std::vector<double> u(static_cast<std::size_t>(q), 1.0 - gp);
      double worst = 0.0;
      for (double t : {0.5, 1.0, 2.0})
        worst = std::max(worst, detail::rel_dev(failure_survival(sm, t, sctl).value,
                                                tc_pgf(p, u, t)));
      detail::push_check(out, "shock", "survival closed form", worst, 1e-10,
                         "geometric threshold survival equals pgf at 1 - p");
    });
  }

  detail::guarded(out, "shock", "survival nonincreasing", [&] {
    std::vector<double> grid;
    for (int i = 0; i <= 16; ++i) grid.push_back(0.25 * i);
    const auto curve = survival_curve(sm, grid, sctl);
    double worst = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
      worst = std::max(worst, curve[i].second - curve[i - 1].second);
    detail::push_check(out, "shock", "survival nonincreasing",
                       std::max(worst, 0.0), 1e-12, "grid 0 to 4, step 0.25");
  });

  detail::guarded(out, "shock", "credited failure rate vs survival slope", [&] {
    const double t = 1.0, h = 1e-4;
    double credited = 0.0;
    for (int r = 0; r < q; ++r)
      credited += failure_subdensity(sm, r, t, sctl).value;
    const double slope = -(failure_survival(sm, t + h, sctl).value -
                           failure_survival(sm, t - h, sctl).value) /
                         (2.0 * h);
    detail::push_check(
        out, "shock", "credited failure rate vs survival slope",
        std::abs(credited / slope - 1.0), 1e-4,
        "sum of per-cause densities " + detail::fmt(credited) +
            " vs total failure rate " + detail::fmt(slope) +
            "; single-component full-clearance crediting leaves simultaneous "
            "jumps and overshoot uncredited, so a gap here is expected");
  });

  detail::guarded(out, "shock", "cause probabilities sum to one", [&] {
    QuadratureControl qctl;
    qctl.abs_tol = 3e-8;
    SeriesControl fast = sctl;
    fast.abs_tol = std::max(fast.abs_tol, 1e-13);
    double total = 0.0;
    for (int r = 0; r < q; ++r)
      total += cause_probability(sm, r, qctl, fast).value;
    detail::push_check(
        out, "shock", "cause probabilities sum to one", std::abs(total - 1.0),
        1e-4,
        "integrated cause pmf total " + detail::fmt(total) +
            "; same crediting gap as the failure-rate check, so a shortfall "
            "below one is expected");
  });

  return out;
}

// Runs one named suite, or all of them. Unknown names throw.
inline std::vector<CheckResult> run_verification(const RunConfig& cfg,
                                                 const std::string& suite) {
  if (suite != "all" && suite != "analytic" && suite != "mc" &&
      suite != "pde" && suite != "shock")
    throw std::invalid_argument("verify: unknown suite: " + suite);
  std::vector<CheckResult> out;
  auto append = [&](std::vector<CheckResult> v) {
    for (auto& c : v) out.push_back(std::move(c));
  };
  if (suite == "all" || suite == "analytic") append(verify_analytic(cfg));
  if (suite == "all" || suite == "mc") append(verify_mc(cfg));
  if (suite == "all" || suite == "pde") append(verify_pde(cfg));
  if (suite == "all" || suite == "shock") append(verify_shock(cfg));
  return out;
}

}  // namespace mgcp
