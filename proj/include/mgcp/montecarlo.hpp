#pragma once

// Exact-in-distribution samplers for every law in the library: the gamma
// clock, the negative binomial shape shift, the counting components, the
// joint subordinated process and its increments, and failure thresholds.
// On top of them sits a deterministic block-partitioned estimator: worker w
// owns a fixed slice of the samples and an RNG stream derived from
// (seed, w), and partial sums merge in worker order, so a given
// (seed, samples, workers) triple always reproduces the same estimate.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mgcp/shock.hpp"

namespace mgcp {

using Rng = std::mt19937_64;

struct McConfig {
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 picks the available hardware parallelism
};

struct McEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::size_t n = 0;
};

struct McEstimateComplex {
  Complex value{0.0, 0.0};
  double std_err_re = 0.0;
  double std_err_im = 0.0;
  std::size_t n = 0;
};

// SplitMix64 scrambler: consecutive inputs map to decorrelated outputs, so
// (seed, stream) pairs give independent-behaving generators.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng{splitmix64(splitmix64(seed) + stream)};
}

// one Gamma(shape, rate) variate; the standard library generator is
// distributionally exact for every shape, including shape < 1
inline double sample_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::domain_error("sample_gamma: need shape > 0 and rate > 0");
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

// negative binomial with real size via the gamma-Poisson mixture:
// W ~ Gamma(size, (1-theta)/theta), then Poisson(W)
inline long long sample_negbin(double theta, double size, Rng& rng) {
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::domain_error("sample_negbin: need theta in (0, 1)");
  if (!(size > 0.0)) throw std::domain_error("sample_negbin: need size > 0");
  const double w = sample_gamma(size, (1.0 - theta) / theta, rng);
  if (!(w > 0.0)) return 0;  // subnormal mixing value: the count is 0 a.s.
  return std::poisson_distribution<long long>(w)(rng);
}

// one draw of the counting component at elapsed operational time x:
// independent Poisson streams of jump sizes 1..k
inline long long sample_gcp(const GcpParams& g, double x, Rng& rng) {
  g.validate();
  if (!(x >= 0.0)) throw std::domain_error("sample_gcp: need x >= 0");
  if (x == 0.0) return 0;
  long long total = 0;
  for (std::size_t j = 0; j < g.rates.size(); ++j) {
    if (g.rates[j] <= 0.0) continue;
    std::poisson_distribution<long long> jumps(g.rates[j] * x);
    total += static_cast<long long>(j + 1) * jumps(rng);
  }
  return total;
}

// joint draw of the subordinator coordinates: one shared negative binomial
// shape shift, then conditionally independent gamma marginals
inline std::vector<double> sample_subordinator(const SubordinatorParams& s,
                                               double t, Rng& rng) {
  s.validate();
  if (!(t > 0.0)) throw std::domain_error("sample_subordinator: need t > 0");
  const double lt = s.lambda * t;
  const double b = static_cast<double>(sample_negbin(s.theta, lt, rng));
  std::vector<double> g(s.a.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = sample_gamma(lt + b, s.a[i], rng);
  return g;
}

// joint draw of the time-changed process at calendar time t
inline std::vector<long long> sample_tc(const TcModelParams& p, double t,
                                        Rng& rng) {
  p.validate();
  if (!(t >= 0.0)) throw std::domain_error("sample_tc: need t >= 0");
  std::vector<long long> out(static_cast<std::size_t>(p.q()), 0);
  if (t == 0.0) return out;
  const auto g = sample_subordinator(p.sub, t, rng);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = sample_gcp(p.gcp.components[i], g[i], rng);
  return out;
}

// increments are stationary and independent, so the increment over any
// window of length h is distributed as the state at time h
inline std::vector<long long> sample_increment(const TcModelParams& p,
                                               double h, Rng& rng) {
  if (!(h > 0.0)) throw std::domain_error("sample_increment: need h > 0");
  return sample_tc(p, h, rng);
}

// one threshold draw; the hypergeometric variant samples the marked count
// exactly (integer arithmetic) and lifts raw zeros to 1, matching the
// survival convention
inline long long sample_threshold(const ThresholdDistribution& dist,
                                  Rng& rng) {
  validate_threshold(dist);
  if (const auto* g = std::get_if<GeometricThreshold>(&dist)) {
    if (g->p == 1.0) return 1;
    return std::geometric_distribution<long long>(g->p)(rng) + 1;
  }
  if (const auto* h = std::get_if<HypergeometricThreshold>(&dist)) {
    long long marked = h->n, remaining = h->N, s = 0;
    for (long long i = 0; i < h->K; ++i) {
      if (marked > 0 &&
          std::uniform_int_distribution<long long>(1, remaining)(rng) <=
              marked) {
        ++s;
        --marked;
      }
      --remaining;
    }
    return std::max<long long>(s, 1);
  }
  const auto& e = std::get<ExplicitThreshold>(dist);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (const auto& [k, pr] : e.pmf) {
    u -= pr;
    if (u < 0.0) return k;
  }
  return e.pmf.back().first;  // rounding spill lands on the last row
}

namespace detail {

struct McAccum {
  double sum = 0.0;
  double sumsq = 0.0;
};

// fixed slice of worker w: samples/workers each, the remainder spread over
// the leading workers
inline std::size_t worker_share(std::size_t samples, int workers, int w) {
  const std::size_t base = samples / static_cast<std::size_t>(workers);
  const std::size_t extra = samples % static_cast<std::size_t>(workers);
  return base + (static_cast<std::size_t>(w) < extra ? 1 : 0);
}

// launches one thread per worker (or runs inline for a single worker)
template <typename Body>
void dispatch_workers(int workers, Body&& body) {
  if (workers == 1) {
    body(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
  for (auto& th : pool) th.join();
}

inline int resolve_workers(const McConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline std::pair<double, double> mean_and_se(const McAccum& total,
                                             std::size_t n) {
  const double nd = static_cast<double>(n);
  const double mean = total.sum / nd;
  if (n < 2) return {mean, 0.0};
  const double var =
      std::max(0.0, (total.sumsq - nd * mean * mean) / (nd - 1.0));
  return {mean, std::sqrt(var / nd)};
}

}  // namespace detail

// Monte Carlo mean of a real functional draw(rng) with its standard error.
// Identical (seed, samples, workers) triples give bit-identical results.
template <typename Fn>
McEstimate estimate(Fn&& draw, const McConfig& cfg) {
  if (cfg.samples < 1)
    throw std::invalid_argument("estimate: need samples >= 1");
  const int workers = detail::resolve_workers(cfg);
  std::vector<detail::McAccum> acc(static_cast<std::size_t>(workers));
  detail::dispatch_workers(workers, [&](int w) {
    Rng rng = stream_rng(cfg.seed, static_cast<std::uint64_t>(w));
    const std::size_t n = detail::worker_share(cfg.samples, workers, w);
    KahanSum s, s2;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = draw(rng);
      s.add(x);
      s2.add(x * x);
    }
    acc[static_cast<std::size_t>(w)] = {s.value(), s2.value()};
  });
  KahanSum s, s2;
  for (const auto& a : acc) {
    s.add(a.sum);
    s2.add(a.sumsq);
  }
  const auto [mean, se] =
      detail::mean_and_se({s.value(), s2.value()}, cfg.samples);
  return {mean, se, cfg.samples};
}

// complex-valued variant (characteristic functions, codifference): one pass,
// per-part standard errors
template <typename Fn>
McEstimateComplex estimate_complex(Fn&& draw, const McConfig& cfg) {
  if (cfg.samples < 1)
    throw std::invalid_argument("estimate_complex: need samples >= 1");
  const int workers = detail::resolve_workers(cfg);
  std::vector<detail::McAccum> acc_re(static_cast<std::size_t>(workers));
  std::vector<detail::McAccum> acc_im(static_cast<std::size_t>(workers));
  detail::dispatch_workers(workers, [&](int w) {
    Rng rng = stream_rng(cfg.seed, static_cast<std::uint64_t>(w));
    const std::size_t n = detail::worker_share(cfg.samples, workers, w);
    KahanSum sr, sr2, si, si2;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex z = draw(rng);
      sr.add(z.real());
      sr2.add(z.real() * z.real());
      si.add(z.imag());
      si2.add(z.imag() * z.imag());
    }
    acc_re[static_cast<std::size_t>(w)] = {sr.value(), sr2.value()};
    acc_im[static_cast<std::size_t>(w)] = {si.value(), si2.value()};
  });
  KahanSum sr, sr2, si, si2;
  for (int w = 0; w < workers; ++w) {
    sr.add(acc_re[static_cast<std::size_t>(w)].sum);
    sr2.add(acc_re[static_cast<std::size_t>(w)].sumsq);
    si.add(acc_im[static_cast<std::size_t>(w)].sum);
    si2.add(acc_im[static_cast<std::size_t>(w)].sumsq);
  }
  const auto [mr, ser] = detail::mean_and_se({sr.value(), sr2.value()},
                                             cfg.samples);
  const auto [mi, sei] = detail::mean_and_se({si.value(), si2.value()},
                                             cfg.samples);
  return {Complex{mr, mi}, ser, sei, cfg.samples};
}

}  // namespace mgcp
